// Command-line front end.

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rfw/annotator.hpp"
#include "rfw/convert.hpp"
#include "rfw/determinize.hpp"
#include "rfw/io.hpp"
#include "rfw/twoway.hpp"

using namespace rfw;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kContract = 2 };

struct Options {
  std::string format = "text";
  std::size_t bound = 0;
  std::size_t max_lookahead = 0;
  std::string theta_policy = "lcm";
};

enum class Kind { Nft, Sst, TwoWay };

Kind detect(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (j.contains("registers")) return Kind::Sst;
  if (j.contains("initial") && j["initial"].is_string()) return Kind::TwoWay;
  return Kind::Nft;
}

ThetaPolicy policy(const Options& o) { return o.theta_policy == "paper-capped" ? ThetaPolicy::PaperCapped : ThetaPolicy::Lcm; }

std::string word(const Alphabet& al, const Word& w) { return al.render(w); }

void print(const Options& o, const json& j, const std::string& text) {
  if (o.format == "json")
    std::cout << j.dump() << "\n";
  else
    std::cout << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, sep))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

StateSet parse_set(const Nft& T, const std::string& s) {
  std::string t = s;
  std::erase(t, '{');
  std::erase(t, '}');
  std::vector<int> qs;
  for (const auto& name : split(t, ',')) {
    int q = T.state_index(name);
    if (q < 0) throw std::invalid_argument("unknown state '" + name + "'");
    qs.push_back(q);
  }
  return make_set(qs);
}

int cmd_check(const Options& o, const std::string& path) {
  Nft T = load_nft(path);
  bool is_trim = trim(T).num_states() == T.num_states();
  bool cl = is_clean(T), un = is_unambiguous(T), pr = is_productive(T);
  ContinuityResult c = is_continuous(T, o.bound);
  json j = {{"trim", is_trim}, {"clean", cl}, {"unambiguous", un}, {"productive", pr}, {"continuous", c.continuous}};
  std::ostringstream s;
  auto b = [](bool v) { return v ? "true" : "false"; };
  s << "trim: " << b(is_trim) << "\nclean: " << b(cl) << "\nunambiguous: " << b(un) << "\nproductive: " << b(pr) << "\ncontinuous: " << b(c.continuous);
  if (c.witness) {
    std::string u = word(T.input, c.witness->u), v = word(T.input, c.witness->u_loop);
    s << " (witness u=" << u << ", u'=" << v << ")";
    j["witness"] = {{"u", u}, {"u_loop", v}, {"out1", render(T.output, c.witness->out1)}, {"out2", render(T.output, c.witness->out2)}};
  }
  s << "\n";
  print(o, j, s.str());
  return is_trim && cl && un && pr && c.continuous ? kOk : kNegative;
}

int cmd_analyze(const Options& o, const std::string& path, const std::string& set) {
  AnalysisContext ctx(prepare_transducer(load_nft(path)), policy(o));
  const Nft& T = ctx.nft();
  std::ostringstream s;
  json j;
  j["states"] = T.num_states();
  j["theta_length"] = ctx.theta_length();
  s << "states: " << T.num_states() << "\ntheta_length: " << ctx.theta_length() << "\n";
  auto describe = [&](const StateSet& C) {
    json d = {{"set", T.set_name(C)}, {"compatible", ctx.is_compatible(C)}};
    s << T.set_name(C) << ": compatible=" << (ctx.is_compatible(C) ? "true" : "false");
    if (ctx.is_compatible(C)) {
      d["separable"] = ctx.is_separable(C);
      s << " separable=" << (ctx.is_separable(C) ? "true" : "false");
      json ends = json::object();
      for (const auto& [q, e] : ctx.ends(C)) {
        ends[T.state_name(q)] = render(T.output, e);
        s << " end(" << T.state_name(q) << ")=" << render(T.output, e);
      }
      d["ends"] = ends;
    }
    s << "\n";
    return d;
  };
  if (!set.empty()) {
    j["sets"] = json::array({describe(parse_set(T, set))});
  } else {
    j["sets"] = json::array();
    for (const auto& C : ctx.comp_subsets(T.all_states())) j["sets"].push_back(describe(C));
  }
  print(o, j, s.str());
  return kOk;
}

int cmd_annotate(const Options& o, const std::string& path, const std::string& input, std::size_t letters) {
  AnalysisContext ctx(prepare_transducer(load_nft(path)), policy(o));
  const Nft& T = ctx.nft();
  UPWord x = parse_up(T.input, input);
  auto sets = annotate(ctx, x, letters, o.max_lookahead);
  std::ostringstream s;
  json j = json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i) {
      s << ' ' << T.input.name(at(x, i - 1)) << ' ';
      j.push_back(T.input.name(at(x, i - 1)));
    }
    s << T.set_name(sets[i]);
    j.push_back(T.set_name(sets[i]));
  }
  s << "\n";
  print(o, j, s.str());
  return kOk;
}

int cmd_determinize(const Options& o, const std::string& path, const std::string& input, std::size_t letters, bool check, bool trace) {
  Nft T = load_nft(path);
  PipelineOptions opt;
  opt.check_invariants = check;
  opt.trace = trace;
  opt.max_lookahead = o.max_lookahead;
  opt.theta = policy(o);
  Pipeline p(T, opt);
  std::size_t traced = 0, printed = 0;
  bool live = input == "-";
  auto flush = [&] {
    const auto& tr = p.determinizer().trace();
    for (; traced < tr.size(); ++traced) std::cout << tr[traced].json << "\n";
    if (live && o.format == "text" && p.out().size() > printed) {
      std::cout << T.output.render(Word(p.out().begin() + static_cast<long>(printed), p.out().end())) << std::endl;
      printed = p.out().size();
    }
  };
  if (live) {
    std::string tok;
    while (std::cin >> tok) {
      p.push(T.input.find(tok));
      while (p.advance()) flush();
    }
  } else {
    UPWord x = parse_up(T.input, input);
    std::size_t fed = 0;
    while (!p.started() || p.steps() < letters) {
      if (p.advance())
        flush();
      else
        p.push(at(x, fed++));
    }
  }
  if (!live || o.format == "json") print(o, {{"out", T.output.render(p.out())}, {"letters", p.steps()}}, T.output.render(p.out()) + "\n");
  return kOk;
}

int cmd_convert(const Options& o, const std::string& from, const std::string& to, const std::string& in, const std::string& out) {
  std::string text;
  if (from == "2dt" && to == "sst") {
    text = dsst_to_json(twoway_to_sst(load_twoway(in)));
  } else if (from == "sst" && to == "2dt") {
    text = twoway_to_json(sst_to_twoway(load_dsst(in)));
  } else if ((from == "ksst" || from == "sst") && to == "copyless") {
    Dsst S = load_dsst(in);
    int K = static_cast<int>(o.bound);
    if (K == 0)
      for (K = 1; K <= 4 && !check_bounded(S, K); ++K) {
      }
    text = dsst_to_json(kbounded_to_copyless(S, K));
  } else {
    throw std::invalid_argument("unsupported conversion " + from + " -> " + to);
  }
  write_file(out, text + "\n");
  print(o, {{"written", out}}, "wrote " + out + "\n");
  return kOk;
}

int cmd_run(const Options& o, const std::string& path, const std::string& input, std::size_t length) {
  std::optional<Word> y;
  Alphabet out_al;
  switch (detect(path)) {
    case Kind::Sst: {
      Dsst S = load_dsst(path);
      out_al = S.output;
      if (auto f = eval_limit(S, parse_up(S.input, input))) y = take(*f, length);
      break;
    }
    case Kind::TwoWay: {
      TwoWayTransducer T = load_twoway(path);
      out_al = T.output;
      auto r = eval_2dt(T, parse_up(T.input, input), length);
      if (r.status == TwoWayResult::Status::Inconclusive) throw std::runtime_error("inconclusive: " + r.reason);
      if (r.status == TwoWayResult::Status::Defined) y = r.out;
      break;
    }
    case Kind::Nft: {
      Nft T = load_nft(path);
      out_al = T.output;
      UPWord x = parse_up(T.input, input);
      PipelineOptions opt;
      opt.max_lookahead = o.max_lookahead;
      opt.theta = policy(o);
      Pipeline p(T, opt);
      std::size_t fed = 0, cap = 64 * (length + 1) + 64;
      while ((!p.started() || p.out().size() < length) && p.steps() < cap)
        if (!p.advance()) p.push(at(x, fed++));
      if (p.out().size() >= length) y = Word(p.out().begin(), p.out().begin() + static_cast<long>(length));
      break;
    }
  }
  if (!y) {
    print(o, {{"defined", false}}, "undefined\n");
    return kNegative;
  }
  print(o, {{"defined", true}, {"out", out_al.render(*y)}}, out_al.render(*y) + "\n");
  return kOk;
}

int cmd_oracle(const Options& o, const std::string& path, const std::string& input) {
  std::optional<UPWord> y;
  Alphabet out_al;
  if (detect(path) == Kind::Sst) {
    Dsst S = load_dsst(path);
    out_al = S.output;
    y = eval_limit(S, parse_up(S.input, input));
  } else {
    Nft T = load_nft(path);
    out_al = T.output;
    y = oracle_eval(T, parse_up(T.input, input));
  }
  if (!y) {
    print(o, {{"defined", false}}, "undefined\n");
    return kNegative;
  }
  print(o, {{"defined", true}, {"out", render(out_al, *y)}}, render(out_al, *y) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous rational functions: analysis, determinization and conversions"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--bound", o.bound, "Continuity search bound, or K for conversions");
  app.add_option("--max-lookahead", o.max_lookahead, "Annotator lookahead limit");
  app.add_option("--theta-policy", o.theta_policy, "Period length policy")->check(CLI::IsMember({"lcm", "paper-capped"}));

  std::string machine, input, set, from, to, in, out;
  std::size_t letters = 20, length = 20;
  bool check = false, trace = false;

  auto* c_check = app.add_subcommand("check", "Structural and continuity verdicts");
  c_check->add_option("machine", machine)->required();
  auto* c_analyze = app.add_subcommand("analyze", "Compatible and separable sets");
  c_analyze->add_option("machine", machine)->required();
  c_analyze->add_option("--set", set, "One set, e.g. q1,q2");
  auto* c_annotate = app.add_subcommand("annotate", "Annotated stream C0 x1 C1 ...");
  c_annotate->add_option("machine", machine)->required();
  c_annotate->add_option("--input", input)->required();
  c_annotate->add_option("--letters", letters);
  auto* c_det = app.add_subcommand("determinize", "Streaming determinization");
  auto* c_run_det = c_det->add_subcommand("run", "Run on an input");
  c_det->require_subcommand(1);
  c_run_det->add_option("machine", machine)->required();
  c_run_det->add_option("--input", input, "Ultimately periodic word, or - for one letter per line on stdin")->required();
  c_run_det->add_option("--letters", letters);
  c_run_det->add_flag("--check-invariants", check);
  c_run_det->add_flag("--trace", trace);
  auto* c_convert = app.add_subcommand("convert", "Model conversions");
  c_convert->add_option("--from", from)->required()->check(CLI::IsMember({"2dt", "sst", "ksst"}));
  c_convert->add_option("--to", to)->required()->check(CLI::IsMember({"sst", "2dt", "copyless"}));
  c_convert->add_option("in", in)->required();
  c_convert->add_option("out", out)->required();
  auto* c_run = app.add_subcommand("run", "First output letters of any machine");
  c_run->add_option("machine", machine)->required();
  c_run->add_option("--input", input)->required();
  c_run->add_option("--length", length, "Output letters");
  auto* c_oracle = app.add_subcommand("oracle", "Exact image of an ultimately periodic word");
  c_oracle->add_option("machine", machine)->required();
  c_oracle->add_option("input", input)->required();

  for (auto* sub : {c_check, c_analyze, c_annotate, c_det, c_run_det, c_convert, c_run, c_oracle}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kContract;
  }

  try {
    if (*c_check) return cmd_check(o, machine);
    if (*c_analyze) return cmd_analyze(o, machine, set);
    if (*c_annotate) return cmd_annotate(o, machine, input, letters);
    if (*c_det) return cmd_determinize(o, machine, input, letters, check, trace);
    if (*c_convert) return cmd_convert(o, from, to, in, out);
    if (*c_run) return cmd_run(o, machine, input, length);
    if (*c_oracle) return cmd_oracle(o, machine, input);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContract;
  } catch (const NotContinuousError& e) {
    std::cerr << "error: transducer is not continuous\n";
    return kContract;
  } catch (const Diverged& e) {
    std::cerr << "error: " << e.what() << " (" << e.buffered << " letters buffered)\n";
    return kNegative;
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNegative;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContract;
  }
  return kContract;
}
