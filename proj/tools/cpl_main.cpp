// Command-line front end: one verb per engine capability, exact rationals by
// default, --json for machine-readable output.  Exit codes: 0 success,
// 1 domain error (or a failed check/validate/verify), 2 usage error.

#include <cpl/eliminator.hpp>
#include <cpl/verify.hpp>
#include <cpl/worlds.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

namespace {

struct Options {
  std::string network;
  std::string formula;
  std::string formula_file;
  std::string assign;
  std::string pattern = "distinct";
  int n = 1;
  int m = 2;
  int k = 4;
  int threads = 1;
  int cap = 24;
  long samples = 1000;
  std::uint64_t seed = 0;
  bool json = false;
  bool as_float = false;
  bool show_cost = false;
  bool limit = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

cpl::Network load_net(const Options& o) {
  if (o.network.empty()) throw CLI::ValidationError("--network is required");
  return cpl::load_network(read_file(o.network));
}

std::string formula_text(const Options& o) {
  if (o.formula.empty() == o.formula_file.empty())
    throw CLI::ValidationError("exactly one of --formula / --formula-file is required");
  if (!o.formula.empty()) return o.formula;
  std::string text = read_file(o.formula_file);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

cpl::Assignment parse_assign(const std::string& s) {
  cpl::Assignment asg;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string part =
        s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t eq = part.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--assign expects var=elem pairs: " + part);
    asg[part.substr(0, eq)] = std::stoi(part.substr(eq + 1));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return asg;
}

std::string float_str(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string num_str(const cpl::Rat& v, bool as_float) {
  return as_float ? float_str(cpl::rat_double(v)) : cpl::rat_str(v);
}

void emit(const Options& o, const nlohmann::ordered_json& doc,
          const std::string& plain) {
  if (o.json)
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << plain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional probability logic over lifted Bayesian networks"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd, bool wants_formula) {
    cmd->add_option("--network", o.network, "network JSON file");
    if (wants_formula) {
      cmd->add_option("--formula", o.formula, "formula text");
      cmd->add_option("--formula-file", o.formula_file, "file holding the formula");
    }
    cmd->add_flag("--json", o.json, "wrap output in a JSON document");
    cmd->add_flag("--float", o.as_float, "print numbers as floating point");
    return cmd;
  };

  auto* c_parse = add_common(app.add_subcommand("parse", "parse and re-render a formula"), true);
  auto* c_qr = add_common(app.add_subcommand("qr", "print the quantifier rank"), true);

  auto* c_elim = add_common(app.add_subcommand("eliminate", "rewrite to a quantifier-free formula"), true);
  c_elim->add_option("--k", o.k, "variable budget");
  c_elim->add_flag("--show-cost", o.show_cost, "print operation tallies");
  c_elim->add_flag("--limit", o.limit, "also print the limit probability");
  c_elim->add_option("--pattern", o.pattern, "equality pattern for --limit");

  auto* c_check = add_common(app.add_subcommand("check", "test margins for criticality"), true);
  c_check->add_option("--k", o.k, "variable budget");

  auto* c_crit = add_common(app.add_subcommand("critical", "list critical numbers"), false);
  c_crit->add_option("--m", o.m, "maximum number of variables");

  auto* c_prob = add_common(app.add_subcommand("prob", "exact probability at domain size n"), true);
  c_prob->add_option("--n", o.n, "domain size");
  c_prob->add_option("--assign", o.assign, "free-variable assignment var=elem,...");
  c_prob->add_option("--cap", o.cap, "world-count cap exponent");
  c_prob->add_option("--threads", o.threads, "worker threads");

  auto* c_sample = add_common(app.add_subcommand("sample", "draw one world"), false);
  c_sample->add_option("--n", o.n, "domain size");
  c_sample->add_option("--seed", o.seed, "sampler seed");

  auto* c_est = add_common(app.add_subcommand("estimate", "Monte Carlo probability estimate"), true);
  c_est->add_option("--n", o.n, "domain size");
  c_est->add_option("--assign", o.assign, "free-variable assignment var=elem,...");
  c_est->add_option("--samples", o.samples, "number of sampled worlds");
  c_est->add_option("--seed", o.seed, "sampler seed");

  auto* c_qfnet = add_common(app.add_subcommand("qfnet", "print the quantifier-free transform"), false);
  c_qfnet->add_option("--k", o.k, "variable budget");

  auto* c_val = add_common(app.add_subcommand("validate", "check network well-formedness"), false);
  c_val->add_option("--n", o.n, "structure sizes to check for quantified guards");

  auto* c_verify = app.add_subcommand("verify", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_parse->parsed()) {
      cpl::Network net = load_net(o);
      std::string out = cpl::render(cpl::parse(formula_text(o), net.signature()));
      emit(o, {{"result", out}}, out + "\n");
      return 0;
    }
    if (c_qr->parsed()) {
      cpl::Network net = load_net(o);
      int rank = cpl::quantifier_rank(cpl::parse(formula_text(o), net.signature()));
      emit(o, {{"result", rank}}, std::to_string(rank) + "\n");
      return 0;
    }
    if (c_elim->parsed()) {
      cpl::Network net = load_net(o);
      cpl::Eliminator elim(net, o.k);
      cpl::FPtr f = cpl::parse(formula_text(o), net.signature());
      std::string star = cpl::render(elim.eliminate(f));
      nlohmann::ordered_json doc{{"result", star}};
      std::string plain = star + "\n";
      if (o.limit) {
        cpl::Rat d = elim.limit_probability(f, o.pattern);
        doc["limit"] = num_str(d, o.as_float);
        plain += num_str(d, o.as_float) + "\n";
      }
      if (o.show_cost) {
        const cpl::CostTally& t = elim.cost();
        doc["cost"] = {{"arith", t.arith}, {"num_cmp", t.num_cmp}, {"lit_cmp", t.lit_cmp}};
        plain += "arith " + std::to_string(t.arith) + "\n";
        plain += "num_cmp " + std::to_string(t.num_cmp) + "\n";
        plain += "lit_cmp " + std::to_string(t.lit_cmp) + "\n";
      }
      emit(o, doc, plain);
      return 0;
    }
    if (c_check->parsed()) {
      cpl::Network net = load_net(o);
      cpl::FPtr f = cpl::parse(formula_text(o), net.signature());
      auto rep = cpl::is_noncritical(net, f, o.k);
      nlohmann::ordered_json doc{{"result", rep.ok}};
      std::string plain;
      doc["witnesses"] = nlohmann::ordered_json::array();
      if (rep.ok) {
        plain = "noncritical\n";
      } else {
        for (const auto& w : rep.witnesses) {
          doc["witnesses"].push_back(cpl::witness_str(w));
          plain += cpl::witness_str(w) + "\n";
        }
      }
      emit(o, doc, plain);
      return rep.ok ? 0 : 1;
    }
    if (c_crit->parsed()) {
      cpl::Network net = load_net(o);
      auto crit = cpl::critical_numbers(net, o.m);
      nlohmann::ordered_json values = nlohmann::ordered_json::array();
      std::string plain;
      for (const auto& v : crit.values) {
        values.push_back(num_str(v, o.as_float));
        plain += num_str(v, o.as_float) + "\n";
      }
      emit(o, {{"result", values}}, plain);
      return 0;
    }
    if (c_prob->parsed()) {
      cpl::Network net = load_net(o);
      cpl::FPtr f = cpl::parse(formula_text(o), net.signature());
      cpl::Rat p =
          cpl::exact_probability(net, o.n, f, parse_assign(o.assign), o.cap, o.threads);
      emit(o, {{"result", num_str(p, o.as_float)}}, num_str(p, o.as_float) + "\n");
      return 0;
    }
    if (c_sample->parsed()) {
      cpl::Network net = load_net(o);
      std::string out = cpl::structure_to_json(cpl::sample_world(net, o.n, o.seed));
      emit(o, {{"result", nlohmann::ordered_json::parse(out)}}, out + "\n");
      return 0;
    }
    if (c_est->parsed()) {
      cpl::Network net = load_net(o);
      cpl::FPtr f = cpl::parse(formula_text(o), net.signature());
      cpl::Estimate est = cpl::estimate_probability(net, o.n, f, parse_assign(o.assign),
                                                    o.samples, o.seed);
      std::ostringstream plain;
      plain << std::fixed << std::setprecision(6) << est.estimate << " +/- "
            << est.half_width_95 << "\n";
      emit(o, {{"result", est.estimate}, {"half_width_95", est.half_width_95}},
           plain.str());
      return 0;
    }
    if (c_qfnet->parsed()) {
      cpl::Network net = load_net(o);
      std::string out = cpl::network_to_json(cpl::quantifier_free_network(net, o.k));
      emit(o, {{"result", nlohmann::ordered_json::parse(out)}}, out + "\n");
      return 0;
    }
    if (c_val->parsed()) {
      cpl::Network net = load_net(o);
      auto rep = cpl::validate(net, c_val->count("--n") ? o.n : 4);
      nlohmann::ordered_json doc{{"result", rep.ok}};
      doc["violations"] = nlohmann::ordered_json::array();
      std::string plain;
      if (rep.ok) {
        plain = "ok\n";
      } else {
        for (const auto& v : rep.violations) {
          doc["violations"].push_back(
              {{"relation", v.relation}, {"kind", v.kind}, {"witness", v.witness}});
          plain += v.kind + " " + v.relation + ": " + v.witness + "\n";
        }
      }
      emit(o, doc, plain);
      return rep.ok ? 0 : 1;
    }
    if (c_verify->parsed()) {
      return cpl::run_acceptance(std::cout) ? 0 : 1;
    }
  } catch (const CLI::ValidationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
