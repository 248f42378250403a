// Command-line front end; talks to the library only through kq.h.
#include "kq/kq.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#ifndef KQ_FIXTURE_DIR
#define KQ_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

enum Exit { kOk = 0, kVerifyFail = 1, kUsage = 2, kGuard = 3 };

struct Failure {
  int code;
  std::string message;
};

int exit_for(kq_status s) {
  switch (s) {
  case KQ_OK:
    return kOk;
  case KQ_ERR_GUARD:
    return kGuard;
  case KQ_ERR_INTERNAL:
    return kVerifyFail;
  default:
    return kUsage;
  }
}

void check(kq_status s) {
  if (s != KQ_OK)
    throw Failure{exit_for(s), std::string(kq_status_name(s)) + ": " + kq_last_error()};
}

struct CString {
  char *p = nullptr;
  ~CString() { kq_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct ModuleDeleter {
  void operator()(kq_module *m) const { kq_module_free(m); }
};
using Module = std::unique_ptr<kq_module, ModuleDeleter>;

Module load_module(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Failure{kUsage, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  kq_module *m = nullptr;
  check(kq_module_parse(ss.str().c_str(), &m));
  return Module(m);
}

struct Globals {
  std::string out;
  std::uint64_t seed = 1;
  bool seed_given = false;
  bool json = false;
};

class Output {
public:
  explicit Output(const std::string &path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw Failure{kUsage, "cannot write " + path};
    }
  }
  std::ostream &os() { return file_.is_open() ? file_ : std::cout; }
  bool to_file() const { return file_.is_open(); }

private:
  std::ofstream file_;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

nlohmann::json run_report(const std::string &command, const CLI::App &app, const nlohmann::json &result,
                          bool pass, double ms) {
  return {{"command", command},   {"config", app.config_to_str(true, false)},
          {"result", result},     {"verdict", pass ? "pass" : "fail"},
          {"wall_ms", ms},        {"version", kq_version()},
          {"schema", "kqtool-report/1"}};
}

std::string part_dims(const nlohmann::json &w) {
  std::string s = "[";
  bool first = true;
  for (const auto &p : w["parts"]) {
    s += (first ? "" : ",") + std::to_string(p[0].get<std::size_t>() + p[1].get<std::size_t>());
    first = false;
  }
  return s + "]";
}

std::size_t dims_sum(const nlohmann::json &pair) { return pair[0].get<std::size_t>() + pair[1].get<std::size_t>(); }

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty())
        out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty())
    out.push_back(cur);
  return out;
}

void print_matrix(std::ostream &os, const nlohmann::json &rows) {
  for (const auto &row : rows) {
    std::string line;
    for (const auto &x : row)
      line += (line.empty() ? "" : " ") + x.get<std::string>();
    os << "  " << line << "\n";
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Kronecker module toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file mirroring the flags");
  Globals g;
  app.add_option("--out", g.out, "write the main output here");
  app.add_option("--seed", g.seed, "seed for every sampling step")->each([&](const std::string &) {
    g.seed_given = true;
  });
  app.add_flag("--json", g.json, "emit a JSON run report");

  // build
  kq_build_spec spec{};
  std::string kind, field = "rational", poly;
  std::size_t n = 0, d = 3, t = 1;
  std::uint64_t p = 0;
  auto *build = app.add_subcommand("build", "construct a module file");
  build->add_option("kind", kind, "P, Q, R, theta-pre, theta-post or sl2p")->required();
  build->add_option("--n", n);
  build->add_option("--d", d);
  build->add_option("--t", t);
  build->add_option("--p", p);
  build->add_option("--poly", poly);
  build->add_option("--field", field);

  // witness
  std::string module_path, eps = "1/4";
  auto *witness = app.add_subcommand("witness", "produce and verify a witness");
  witness->add_option("--module", module_path)->required();
  witness->add_option("--eps", eps)->required();

  // staged fragmentation of the postinjective tree module
  std::size_t l_override = 0;
  auto *fragment = app.add_subcommand("fragment", "staged fragmentation of theta-post(d, t)");
  fragment->add_option("--d", d);
  fragment->add_option("--t", t)->required();
  fragment->add_option("--eps", eps)->required();
  fragment->add_option("--field", field);
  fragment->add_option("--l-override", l_override);

  // sweep
  std::size_t from = 1, to = 0, step = 1;
  std::string eps_list = "1/2,1/4,1/10";
  auto *sweep = app.add_subcommand("sweep", "witness sweep as CSV");
  sweep->add_option("--kind", kind)->required();
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--step", step)->check(CLI::PositiveNumber);
  sweep->add_option("--eps", eps_list);
  sweep->add_option("--d", d);
  sweep->add_option("--field", field);
  sweep->add_option("--l-override", l_override);

  // sl2p
  std::size_t trials = 50;
  std::string fixture_mode, fixture_dir = KQ_FIXTURE_DIR;
  auto *sl2p = app.add_subcommand("sl2p", "restricted representation of SL(2,p) and its Kazhdan bracket");
  sl2p->add_option("--p", p)->required();
  sl2p->add_option("--trials", trials);
  sl2p->add_option("--fixture", fixture_mode)->check(CLI::IsMember({"check", "write"}));
  sl2p->add_option("--fixture-dir", fixture_dir);

  auto *rep = app.add_subcommand("rep", "representation matrices");
  auto *rep_dump = rep->add_subcommand("dump", "print s and t in matrix text format");
  rep->require_subcommand(1);
  rep_dump->add_option("--p", p)->required();

  // expander
  std::string maps_path, eta = "1/2", alpha = "1", mode = "exhaustive";
  std::uint64_t from_sl2p = 0, guard = 0;
  long max_entry = 5;
  bool reverse = false, bounds_only = false;
  std::string exp_field;
  auto *expander = app.add_subcommand("expander", "dimension expander check");
  auto *maps_opt = expander->add_option("--maps", maps_path, "module file whose maps are the candidate");
  expander->add_option("--from-sl2p", from_sl2p, "use (I, rho_p(s), rho_p(t))")->excludes(maps_opt);
  expander->add_option("--field", exp_field);
  expander->add_option("--eta", eta);
  expander->add_option("--alpha", alpha);
  expander->add_option("--mode", mode)->check(CLI::IsMember({"exhaustive", "sample"}));
  expander->add_option("--trials", trials);
  expander->add_option("--max-entry", max_entry);
  expander->add_option("--guard", guard);
  expander->add_flag("--reverse", reverse);
  expander->add_flag("--bounds-only", bounds_only);

  auto *decompose = app.add_subcommand("decompose", "Kronecker canonical form of a pencil");
  decompose->add_option("--module", module_path)->required();
  auto *gamma = app.add_subcommand("gamma", "coefficient quiver export");
  gamma->add_option("--module", module_path)->required();

  std::size_t l_eps = 4;
  std::uint64_t budget = 1000000;
  auto *best = app.add_subcommand("best-eps", "search for the smallest epsilon at a part bound");
  best->add_option("--module", module_path)->required();
  best->add_option("--l", l_eps)->required();
  best->add_option("--budget", budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Output out(g.out);
    auto emit_json = [&](const std::string &cmd, const CLI::App &sub, const nlohmann::json &result, bool pass) {
      out.os() << run_report(cmd, sub, result, pass, ms_since(t0)).dump(2) << "\n";
    };

    if (*build) {
      spec.kind = kind.c_str();
      spec.field = field.c_str();
      spec.d = d;
      spec.n = n;
      spec.t = t;
      spec.p = p;
      spec.poly = poly.empty() ? nullptr : poly.c_str();
      kq_module *raw = nullptr;
      check(kq_module_build(&spec, &raw));
      Module m(raw);
      std::size_t md = 0, d1 = 0, d2 = 0;
      check(kq_module_dims(m.get(), &md, &d1, &d2));
      CString text;
      check(kq_module_to_text(m.get(), &text.p));
      out.os() << text.str();
      std::ostream &info = out.to_file() ? std::cout : std::cerr;
      info << "dims " << d1 << "x" << d2 << " defect " << static_cast<long>(d1) - static_cast<long>(d2) << "\n";
      return kOk;
    }

    if (*witness || *fragment) {
      CString js;
      int pass = 0;
      if (*witness) {
        Module m = load_module(module_path);
        check(kq_witness(m.get(), eps.c_str(), &js.p, &pass));
      } else {
        check(kq_theta_fragment(d, t, field.c_str(), eps.c_str(), l_override, &js.p, &pass));
      }
      const auto w = nlohmann::json::parse(js.str());
      if (g.json) {
        emit_json(*witness ? "witness" : "fragment", *witness ? *witness : *fragment, w, pass != 0);
      } else {
        auto &os = out.os();
        os << "producer " << w["producer"].get<std::string>() << "\n";
        os << "l_eps " << w["l_eps"].get<std::string>() << "\n";
        os << "parts " << part_dims(w) << "\n";
        os << "dim " << dims_sum(w["submodule_dims"]) << "/" << dims_sum(w["module"]["dims"]) << "\n";
        if (w["stats"].value("below_threshold", false))
          os << "below threshold " << w["stats"]["threshold"].get<std::string>() << "\n";
        os << "verdict " << (pass ? "pass" : "fail");
        if (!pass)
          os << " (" << w["verdict"]["detail"].get<std::string>() << ")";
        os << "\n";
      }
      return pass ? kOk : kVerifyFail;
    }

    if (*sweep) {
      auto &os = out.os();
      os << "module,dim,eps,l_eps,parts,max_part,removed_fraction,verdict,ms,flag\n";
      bool all = true;
      const auto eps_values = split_list(eps_list);
      for (std::size_t x = from; x <= to; x += step) {
        for (const auto &e : eps_values) {
          const auto r0 = std::chrono::steady_clock::now();
          CString js;
          int pass = 0;
          std::string id;
          if (kind == "theta-post") {
            id = "theta-post(" + std::to_string(d) + "," + std::to_string(x) + ")";
            check(kq_theta_fragment(d, x, field.c_str(), e.c_str(), l_override, &js.p, &pass));
          } else {
            kq_build_spec s{};
            s.kind = kind.c_str();
            s.field = field.c_str();
            s.d = d;
            s.n = x;
            s.t = x;
            kq_module *raw = nullptr;
            check(kq_module_build(&s, &raw));
            Module m(raw);
            id = kind == "theta-pre" ? "theta-pre(" + std::to_string(d) + "," + std::to_string(x) + ")"
                                     : kind + std::to_string(x);
            check(kq_witness(m.get(), e.c_str(), &js.p, &pass));
          }
          const auto w = nlohmann::json::parse(js.str());
          const auto &v = w["verdict"];
          all = all && pass;
          char ms[32];
          std::snprintf(ms, sizeof ms, "%.3f", ms_since(r0));
          os << id << "," << dims_sum(w["module"]["dims"]) << "," << e << "," << w["l_eps"].get<std::string>()
             << "," << w["parts"].size() << "," << v["max_part"] << "," << v["removed_fraction"].get<std::string>()
             << "," << (pass ? "pass" : "fail") << "," << ms << ","
             << (w["stats"].value("below_threshold", false) ? "below-threshold" : "") << "\n";
        }
        if (x + step < x)
          break;
      }
      return all ? kOk : kVerifyFail;
    }

    if (*sl2p) {
      CString dump, js;
      check(kq_rep_dump(p, &dump.p));
      if (fixture_mode == "write") {
        std::ofstream f(fixture_dir + "/rho_" + std::to_string(p) + ".txt");
        f << dump.str();
        if (!f)
          throw Failure{kUsage, "cannot write fixture"};
      }
      bool fixture_ok = true;
      if (fixture_mode == "check") {
        std::ifstream f(fixture_dir + "/rho_" + std::to_string(p) + ".txt");
        if (!f)
          throw Failure{kUsage, "no fixture for p = " + std::to_string(p)};
        std::stringstream ss;
        ss << f.rdbuf();
        fixture_ok = ss.str() == dump.str();
      }
      check(kq_sl2p_report(p, trials, g.seed, &js.p));
      auto r = nlohmann::json::parse(js.str());
      const bool pass = fixture_ok && r["irreducible"].get<bool>() && r["t_symmetric"].get<bool>();
      if (!fixture_mode.empty())
        r["fixture"] = fixture_ok ? "match" : "mismatch";
      if (g.json) {
        emit_json("sl2p", *sl2p, r, pass);
      } else {
        auto &os = out.os();
        os << "rho_" << p << "(s) =\n";
        print_matrix(os, r["rho_s"]);
        os << "rho_" << p << "(t) =\n";
        print_matrix(os, r["rho_t"]);
        os << (r["irreducible"].get<bool>() ? "irreducible" : "reducible") << " (commutant dim "
           << r["commutant_dim"] << ")\n";
        os << "t symmetric " << (r["t_symmetric"].get<bool>() ? "yes" : "no") << "\n";
        os << "kazhdan bracket [" << r["kazhdan"]["lower_bound"] << ", " << r["kazhdan"]["upper_bound"]
           << "] on dim " << r["kazhdan"]["dimension"] << "\n";
        os << "alpha " << r["alpha"] << "\n";
        if (r.contains("epsilon_bound"))
          os << "epsilon bounds strong " << r["epsilon_bound"] << " weak " << r["weak_epsilon_bound"] << "\n";
        if (!fixture_mode.empty())
          os << "fixture " << r["fixture"].get<std::string>() << "\n";
      }
      return pass ? kOk : kVerifyFail;
    }

    if (*rep_dump) {
      CString dump;
      check(kq_rep_dump(p, &dump.p));
      out.os() << dump.str();
      return kOk;
    }

    if (*expander) {
      if (bounds_only) {
        CString js;
        check(kq_expander_bounds(alpha.c_str(), &js.p));
        const auto b = nlohmann::json::parse(js.str());
        if (g.json)
          emit_json("expander", *expander, b, true);
        else
          out.os() << "strong " << b["strong"].get<std::string>() << "\nweak " << b["weak"].get<std::string>()
                   << "\n";
        return kOk;
      }
      Module m;
      if (!maps_path.empty()) {
        m = load_module(maps_path);
      } else if (from_sl2p) {
        kq_build_spec s{};
        s.kind = "sl2p";
        s.p = from_sl2p;
        s.field = exp_field.empty() ? "rational" : exp_field.c_str();
        kq_module *raw = nullptr;
        check(kq_module_build(&s, &raw));
        m.reset(raw);
      } else {
        throw Failure{kUsage, "expander needs --maps, --from-sl2p or --bounds-only"};
      }
      if (!exp_field.empty() && !maps_path.empty()) {
        CString tag;
        check(kq_module_field(m.get(), &tag.p));
        const std::string want = exp_field == "Q" || exp_field == "q" ? "rational" : exp_field;
        if (want != tag.str())
          throw Failure{kUsage, "--field " + exp_field + " does not match the maps file (field " + tag.str() + ")"};
      }
      const bool sampled = mode == "sample";
      if (sampled && !g.seed_given)
        throw Failure{kUsage, "sampling needs --seed"};
      kq_expander_options o{};
      o.eta = eta.c_str();
      o.alpha = alpha.c_str();
      o.sampled = sampled ? 1 : 0;
      o.trials = trials;
      o.max_entry = max_entry;
      o.seed = g.seed;
      o.guard = guard;
      o.reverse = reverse ? 1 : 0;
      CString js;
      kq_verdict verdict = KQ_PROVED;
      check(kq_expander_check(m.get(), &o, &js.p, &verdict));
      const auto r = nlohmann::json::parse(js.str());
      if (g.json) {
        emit_json("expander", *expander, r, true);
      } else {
        auto &os = out.os();
        os << "verdict " << r["verdict"].get<std::string>() << "\n";
        os << "subspaces checked " << r["subspaces_checked"] << "\n";
        if (!r["worst_ratio"].is_null())
          os << "worst ratio " << r["worst_ratio"].get<std::string>() << "\n";
        if (!r["witness"].is_null())
          os << "witness\n" << r["witness"].get<std::string>();
        if (sampled)
          os << "seed " << g.seed << "\n";
      }
      return kOk;
    }

    if (*decompose) {
      Module m = load_module(module_path);
      CString js;
      check(kq_decompose(m.get(), &js.p));
      const auto r = nlohmann::json::parse(js.str());
      if (g.json) {
        emit_json("decompose", *decompose, r, r["certified"].get<bool>());
      } else {
        for (const auto &b : r["blocks"])
          out.os() << b["block"].get<std::string>() << " x" << b["multiplicity"] << "\n";
        out.os() << "certified " << (r["certified"].get<bool>() ? "yes" : "no") << "\n";
      }
      return r["certified"].get<bool>() ? kOk : kVerifyFail;
    }

    if (*gamma) {
      Module m = load_module(module_path);
      CString text;
      check(kq_gamma(m.get(), &text.p));
      out.os() << text.str();
      return kOk;
    }

    if (*best) {
      Module m = load_module(module_path);
      CString js;
      check(kq_best_epsilon(m.get(), l_eps, budget, &js.p));
      const auto r = nlohmann::json::parse(js.str());
      if (g.json)
        emit_json("best-eps", *best, r, true);
      else
        out.os() << "epsilon " << r["epsilon"].get<std::string>() << (r["partial"].get<bool>() ? " (partial)" : "")
                 << " by " << r["method"].get<std::string>() << "\n";
      return kOk;
    }
  } catch (const Failure &f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kUsage;
}
