#include "rfw/twoway.hpp"

#include <json.hpp>

#include "rfw/io.hpp"

namespace rfw {

using nlohmann::json;

int TwoWayTransducer::add_state(const std::string& name) {
  if (state_index(name) >= 0) throw std::invalid_argument("duplicate state '" + name + "'");
  states_.push_back(name);
  return num_states() - 1;
}

int TwoWayTransducer::state_index(const std::string& name) const {
  for (std::size_t q = 0; q < states_.size(); ++q)
    if (states_[q] == name) return static_cast<int>(q);
  return -1;
}

void TwoWayTransducer::set_move(int q, int look, Letter a, TwoWayMove m) {
  if (q < 0 || q >= num_states() || m.to < 0 || m.to >= num_states()) throw std::invalid_argument("unknown state");
  if (look < 0 || static_cast<std::size_t>(look) >= look_states()) throw std::invalid_argument("unknown lookbehind state");
  if (a != kEndmarker && (a < 0 || static_cast<std::size_t>(a) >= input.size())) throw std::invalid_argument("unknown letter");
  if (a == kEndmarker && m.dir == Dir::Left) throw std::invalid_argument("left move on the endmarker");
  moves_[{q, look, a}] = std::move(m);
}

const TwoWayMove* TwoWayTransducer::move(int q, int look, Letter a) const {
  auto it = moves_.find({q, look, a});
  return it == moves_.end() ? nullptr : &it->second;
}

bool TwoWayTransducer::moves_left() const {
  for (const auto& [k, m] : moves_)
    if (m.dir == Dir::Left) return true;
  return false;
}

TwoWayResult eval_2dt(const TwoWayTransducer& T, const UPWord& x, std::size_t n, std::size_t step_budget) {
  TwoWayResult res;
  std::vector<int> look{T.lookbehind ? T.lookbehind->initial : 0};
  auto look_at = [&](std::size_t i) {
    if (i == 0) return look[0];
    while (look.size() < i + 1) {
      std::size_t j = look.size();  // look[j] is the state after x[1..j-1]
      look.push_back(j == 1 ? look[0] : T.lookbehind ? T.lookbehind->step(look[j - 1], at(x, j - 2)) : 0);
    }
    return look[i];
  };
  int q = T.initial();
  std::size_t pos = 0, max_pos = 0, since_max = 0;
  // Once n letters are out, run until the head passes its furthest position, so
  // that output produced inside a loop is not reported.
  std::optional<std::size_t> mark;
  while (!mark || max_pos <= *mark) {
    if (!mark && res.out.size() >= n) {
      mark = max_pos;
      continue;
    }
    if (res.steps == step_budget) {
      res.status = TwoWayResult::Status::Inconclusive;
      res.reason = "step budget " + std::to_string(step_budget) + " exhausted";
      return res;
    }
    int d = look_at(pos);
    const TwoWayMove* m = d < 0 ? nullptr : T.move(q, d, pos == 0 ? kEndmarker : at(x, pos - 1));
    if (!m) {
      res.status = TwoWayResult::Status::Undefined;
      res.reason = "blocked at position " + std::to_string(pos);
      return res;
    }
    res.out.insert(res.out.end(), m->out.begin(), m->out.end());
    q = m->to;
    pos = m->dir == Dir::Right ? pos + 1 : pos - 1;
    ++res.steps;
    if (pos > max_pos) {
      max_pos = pos;
      since_max = 0;
    } else if (++since_max > static_cast<std::size_t>(T.num_states()) * (max_pos + 1)) {
      // Some configuration (q, i) with i <= max_pos repeated.
      res.status = TwoWayResult::Status::Undefined;
      res.reason = "loop below position " + std::to_string(max_pos);
      return res;
    }
  }
  res.out.resize(n);
  res.status = TwoWayResult::Status::Defined;
  return res;
}

namespace {

const char* kEndName = "|-";

std::string letter_name(const TwoWayTransducer& T, Letter a) { return a == kEndmarker ? kEndName : T.input.name(a); }

}  // namespace

TwoWayTransducer twoway_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
  try {
    TwoWayTransducer T;
    T.input = Alphabet(j.at("input_alphabet").get<std::vector<std::string>>());
    T.output = Alphabet(j.at("output_alphabet").get<std::vector<std::string>>());
    if (T.input.contains(kEndName)) throw FormatError("input alphabet contains the endmarker name");
    for (const auto& s : j.at("states").get<std::vector<std::string>>()) T.add_state(s);
    auto state = [&](const std::string& s) {
      int q = T.state_index(s);
      if (q < 0) throw FormatError("unknown state '" + s + "'");
      return q;
    };
    T.set_initial(state(j.at("initial").get<std::string>()));
    std::vector<std::string> look_names;
    if (j.contains("lookbehind")) {
      const json& lb = j["lookbehind"];
      Lookbehind L;
      L.names = lb.at("states").get<std::vector<std::string>>();
      auto look = [&](const std::string& s) {
        for (std::size_t d = 0; d < L.names.size(); ++d)
          if (L.names[d] == s) return static_cast<int>(d);
        throw FormatError("unknown lookbehind state '" + s + "'");
      };
      L.initial = look(lb.at("initial").get<std::string>());
      L.delta.assign(L.names.size(), std::vector<int>(T.input.size(), -1));
      for (const auto& t : lb.at("delta"))
        L.delta[static_cast<std::size_t>(look(t.at("from").get<std::string>()))]
               [static_cast<std::size_t>(T.input.find(t.at("letter").get<std::string>()))] = look(t.at("to").get<std::string>());
      look_names = L.names;
      T.lookbehind = std::move(L);
    }
    for (const auto& t : j.at("transitions")) {
      std::string a = t.at("letter").get<std::string>();
      std::string mv = t.at("move").get<std::string>();
      if (mv != "left" && mv != "right") throw FormatError("move must be left or right");
      int d = 0;
      if (t.contains("look")) {
        if (!T.lookbehind) throw FormatError("'look' without a lookbehind block");
        std::string s = t["look"].get<std::string>();
        d = -1;
        for (std::size_t k = 0; k < look_names.size(); ++k)
          if (look_names[k] == s) d = static_cast<int>(k);
        if (d < 0) throw FormatError("unknown lookbehind state '" + s + "'");
      } else if (T.lookbehind) {
        throw FormatError("transition without 'look'");
      }
      T.set_move(state(t.at("from").get<std::string>()), d, a == kEndName ? kEndmarker : T.input.find(a),
                 {state(t.at("to").get<std::string>()), mv == "left" ? Dir::Left : Dir::Right, T.output.parse(t.value("out", ""))});
    }
    return T;
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(e.what());
  }
}

std::string twoway_to_json(const TwoWayTransducer& T) {
  json j;
  j["input_alphabet"] = T.input.names();
  j["output_alphabet"] = T.output.names();
  std::vector<std::string> states;
  for (int q = 0; q < T.num_states(); ++q) states.push_back(T.state_name(q));
  j["states"] = states;
  j["initial"] = T.state_name(T.initial());
  if (T.lookbehind) {
    const Lookbehind& L = *T.lookbehind;
    json lb;
    lb["states"] = L.names;
    lb["initial"] = L.names[static_cast<std::size_t>(L.initial)];
    lb["delta"] = json::array();
    for (std::size_t d = 0; d < L.delta.size(); ++d)
      for (std::size_t a = 0; a < L.delta[d].size(); ++a)
        if (L.delta[d][a] >= 0)
          lb["delta"].push_back({{"from", L.names[d]}, {"letter", T.input.name(static_cast<Letter>(a))}, {"to", L.names[static_cast<std::size_t>(L.delta[d][a])]}});
    j["lookbehind"] = lb;
  }
  j["transitions"] = json::array();
  for (const auto& [key, m] : T.moves()) {
    auto [q, d, a] = key;
    json t = {{"from", T.state_name(q)}, {"letter", letter_name(T, a)}, {"to", T.state_name(m.to)}, {"move", m.dir == Dir::Left ? "left" : "right"}};
    if (!m.out.empty()) t["out"] = T.output.render(m.out);
    if (T.lookbehind) t["look"] = T.lookbehind->names[static_cast<std::size_t>(d)];
    j["transitions"].push_back(t);
  }
  return j.dump(2);
}

TwoWayTransducer load_twoway(const std::string& path) { return twoway_from_json(read_file(path)); }

}  // namespace rfw
