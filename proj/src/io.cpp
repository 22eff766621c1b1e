#include "rfw/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace rfw {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
}

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw FormatError(std::string("missing array '") + key + "'");
  return j[key].get<std::vector<std::string>>();
}

}  // namespace

Nft nft_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
  try {
    Nft T;
    T.input = Alphabet(string_list(j, "input_alphabet"));
    T.output = Alphabet(string_list(j, "output_alphabet"));
    for (const auto& s : string_list(j, "states")) T.add_state(s);
    auto state = [&](const std::string& s) {
      int q = T.state_index(s);
      if (q < 0) throw FormatError("unknown state '" + s + "'");
      return q;
    };
    for (const auto& s : string_list(j, "initial")) T.set_initial(state(s), true);
    for (const auto& s : string_list(j, "final")) T.set_final(state(s), true);
    if (!j.contains("transitions")) throw FormatError("missing 'transitions'");
    for (const auto& t : j["transitions"]) {
      std::string out = t.value("out", "");
      T.add_transition(state(t.at("from").get<std::string>()), T.input.find(t.at("letter").get<std::string>()),
                       state(t.at("to").get<std::string>()), T.output.parse(out));
    }
    return T;
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

std::string nft_to_json(const Nft& T) {
  json j;
  j["input_alphabet"] = T.input.names();
  j["output_alphabet"] = T.output.names();
  std::vector<std::string> states, init, fin;
  for (int q = 0; q < T.num_states(); ++q) {
    states.push_back(T.state_name(q));
    if (T.is_initial(q)) init.push_back(T.state_name(q));
    if (T.is_final(q)) fin.push_back(T.state_name(q));
  }
  j["states"] = states;
  j["initial"] = init;
  j["final"] = fin;
  j["transitions"] = json::array();
  for (const auto& t : T.transitions())
    j["transitions"].push_back({{"from", T.state_name(t.from)},
                                {"letter", T.input.name(t.letter)},
                                {"to", T.state_name(t.to)},
                                {"out", T.output.render(t.out)}});
  return j.dump(2) + "\n";
}

Nft load_nft(const std::string& path) { return nft_from_json(read_file(path)); }

Dsst dsst_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
  try {
    Dsst S;
    S.input = Alphabet(string_list(j, "input_alphabet"));
    S.output = Alphabet(string_list(j, "output_alphabet"));
    for (const auto& r : string_list(j, "registers")) S.add_register(r);
    int out = S.register_index(j.at("out").get<std::string>());
    if (out < 0) throw FormatError("unknown out register");
    S.set_out(out);
    for (const auto& s : string_list(j, "states")) S.add_state(s);
    auto state = [&](const std::string& s) {
      int q = S.state_index(s);
      if (q < 0) throw FormatError("unknown state '" + s + "'");
      return q;
    };
    S.set_initial(state(j.at("initial").get<std::string>()));
    std::map<std::pair<int, Letter>, Substitution> updates;
    if (j.contains("updates"))
      for (const auto& u : j["updates"]) {
        auto key = std::make_pair(state(u.at("state").get<std::string>()), S.input.find(u.at("letter").get<std::string>()));
        Substitution s = Substitution::identity(S.num_registers());
        for (const auto& [reg, word] : u.at("assign").items()) {
          int r = S.register_index(reg);
          if (r < 0) throw FormatError("unknown register '" + reg + "'");
          s.assign[static_cast<std::size_t>(r)] = S.parse(word.get<std::string>());
        }
        if (!updates.emplace(key, s).second) throw FormatError("duplicate update");
      }
    for (const auto& d : j.at("delta")) {
      int q = state(d.at("from").get<std::string>());
      Letter a = S.input.find(d.at("letter").get<std::string>());
      auto it = updates.find({q, a});
      S.set_edge(q, a, state(d.at("to").get<std::string>()),
                 it == updates.end() ? Substitution::identity(S.num_registers()) : it->second);
      if (it != updates.end()) updates.erase(it);
    }
    if (!updates.empty()) throw FormatError("update without a transition");
    return S;
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

std::string dsst_to_json(const Dsst& S) {
  json j;
  j["input_alphabet"] = S.input.names();
  j["output_alphabet"] = S.output.names();
  std::vector<std::string> regs, states;
  for (std::size_t r = 0; r < S.num_registers(); ++r) regs.push_back(S.register_name(static_cast<int>(r)));
  for (int q = 0; q < S.num_states(); ++q) states.push_back(S.state_name(q));
  j["registers"] = regs;
  j["out"] = S.register_name(S.out());
  j["states"] = states;
  j["initial"] = S.state_name(S.initial());
  j["delta"] = json::array();
  j["updates"] = json::array();
  for (int q = 0; q < S.num_states(); ++q)
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a) {
      const SstEdge* e = S.edge(q, a);
      if (!e) continue;
      j["delta"].push_back({{"from", S.state_name(q)}, {"letter", S.input.name(a)}, {"to", S.state_name(e->to)}});
      json assign = json::object();
      for (std::size_t r = 0; r < S.num_registers(); ++r)
        if (!(e->update.assign[r] == RegWord{reg_sym(static_cast<int>(r))}))
          assign[S.register_name(static_cast<int>(r))] = S.render(e->update.assign[r]);
      j["updates"].push_back({{"state", S.state_name(q)}, {"letter", S.input.name(a)}, {"assign", assign}});
    }
  return j.dump(2) + "\n";
}

Dsst load_dsst(const std::string& path) { return dsst_from_json(read_file(path)); }

}  // namespace rfw
