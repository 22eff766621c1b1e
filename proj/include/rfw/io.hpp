#pragma once

#include <string>

#include "rfw/nft.hpp"
#include "rfw/sst.hpp"

namespace rfw {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Nft nft_from_json(const std::string& text);
std::string nft_to_json(const Nft& T);
Nft load_nft(const std::string& path);

/// Registers left out of an update keep their value.
Dsst dsst_from_json(const std::string& text);
std::string dsst_to_json(const Dsst& S);
Dsst load_dsst(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace rfw
