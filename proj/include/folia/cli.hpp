#pragma once

// Command-line front end. run_cli() is the whole program minus main(), so the
// exit-code contract can be tested in-process.
//
// Exit codes: 0 success; 1 a check or verdict came out negative; 2 sampling
// or precondition failure; 3 malformed input or usage; 4 internal sanity failure.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "folia/errors.hpp"
#include "folia/json_io.hpp"
#include "folia/logfol.hpp"
#include "folia/tangent.hpp"

namespace folia {

enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitPrecondition = 2, kExitMalformed = 3, kExitSanity = 4 };

/// Default field: F_p for p from FOLIA_DEFAULT_PRIME if set, else F_32003.
inline FieldSpec default_field() {
  if (const char* env = std::getenv("FOLIA_DEFAULT_PRIME"); env && *env) {
    try {
      return FieldSpec::parse(env);
    } catch (const std::exception& e) {
      throw UsageError(std::string("FOLIA_DEFAULT_PRIME: ") + e.what());
    }
  }
  return FieldSpec::prime_field(kDefaultPrime);
}

/// Calls fn.template operator()<K>() with K matching the field.
template <class F>
decltype(auto) with_field(const FieldSpec& f, F&& fn) {
  if (f.is_rational()) return fn.template operator()<Rational>();
  return fn.template operator()<Fp>();
}

namespace cli_detail {

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw UsageError("empty entry in list '" + s + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("not an integer: '" + tok + "'");
    }
    if (used != tok.size()) throw UsageError("not an integer: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

inline std::vector<FieldSpec> parse_field_list(const std::string& s) {
  std::vector<FieldSpec> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(FieldSpec::parse(tok));
  if (out.empty()) throw UsageError("empty field list");
  return out;
}

inline json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON in '") + path + "': " + e.what());
  }
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text << '\n';
}

inline json provenance(const std::string& command, const std::vector<std::string>& args,
                       const std::optional<std::uint64_t>& seed, const FieldSpec& f) {
  return json{{"version", FOLIA_VERSION},
              {"command", command},
              {"args", args},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"field", field_to_json(f)}};
}

inline std::string scan_key(int n, const std::vector<int>& d, std::uint64_t seed, const FieldSpec& f) {
  std::string ds;
  for (int x : d) ds += (ds.empty() ? "" : ",") + std::to_string(x);
  return "n=" + std::to_string(n) + ";d=" + ds + ";seed=" + std::to_string(seed) + ";field=" + f.name();
}

/// Maps an exception from a command body to an exit code.
inline int report_error(std::ostream& err, const std::exception& e, int code) {
  err << "error: " << e.what() << '\n';
  return code;
}

struct ScanTask {
  int n = 0;
  std::vector<int> degrees;
  std::uint64_t seed = 0;
  FieldSpec field;
  std::string key;
};

inline json run_scan_task(const ScanTask& t, std::size_t directions) {
  json line{{"key", t.key}, {"n", t.n}, {"degrees", t.degrees}, {"seed", t.seed}, {"field", field_to_json(t.field)}};
  try {
    line["report"] = with_field(t.field, [&]<class K>() {
      const auto p = random_params<K>(t.seed, t.n, 2, DegreeVector(t.degrees), t.field);
      CertifyOptions opt;
      opt.dual_directions = directions;
      opt.throw_on_sanity_failure = false;
      return report_to_json(certify_stability(p, opt));
    });
  } catch (const std::exception& e) {
    line["error"] = e.what();
  }
  return line;
}

}  // namespace cli_detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"folia: logarithmic foliations on projective space, exact certificates", "folia"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FOLIA_VERSION));

  // random
  auto* c_random = app.add_subcommand("random", "Sample generic parameters (LogParams JSON)");
  int r_n = 0, r_q = 0;
  std::string r_degrees, r_field, r_out;
  std::uint64_t r_seed = 0;
  c_random->add_option("--n", r_n, "Projective dimension")->required();
  c_random->add_option("--q", r_q, "Form degree")->required();
  c_random->add_option("--degrees", r_degrees, "Comma-separated degrees d_1,...,d_m")->required();
  c_random->add_option("--seed", r_seed, "RNG seed");
  c_random->add_option("--prime,--field", r_field, "Prime p or Q");
  c_random->add_option("--out,-o", r_out, "Output file (default stdout)");

  // verify
  auto* c_verify = app.add_subcommand("verify", "Check descent, Plucker, integrability and genericity");
  std::string v_path, v_field;
  c_verify->add_option("params", v_path, "LogParams JSON file, or - for stdin")->required();
  c_verify->add_option("--prime,--field", v_field, "Prime p or Q (overrides the file)");

  // certify
  auto* c_certify = app.add_subcommand("certify", "Stability certificate: rank(drho) == dim tangent cone");
  std::string c_path, c_primes, c_out;
  std::size_t c_directions = 10;
  c_certify->add_option("params", c_path, "LogParams JSON file, or - for stdin")->required();
  c_certify->add_option("--primes,--prime,--field", c_primes, "Comma-separated primes, Q allowed");
  c_certify->add_option("--directions", c_directions, "Random directions for the dual-number check");
  c_certify->add_option("--out,-o", c_out, "Output file (default stdout)");

  // scan
  auto* c_scan = app.add_subcommand("scan", "Certify a grid of random instances into a resumable JSONL file");
  std::string s_config, s_out;
  unsigned s_jobs = 1;
  c_scan->add_option("config", s_config, "Scan configuration JSON")->required();
  c_scan->add_option("out", s_out, "Output JSONL file (appended to)")->required();
  c_scan->add_option("--jobs,-j", s_jobs, "Worker threads")->check(CLI::PositiveNumber);

  // basis-dim
  auto* c_basis = app.add_subcommand("basis-dim", "Dimension of H^0(P^n, Omega^q(d)) with the closed-form cross-check");
  int b_n = 0, b_q = 0, b_d = 0;
  std::string b_field;
  c_basis->add_option("--n", b_n)->required();
  c_basis->add_option("--q", b_q)->required();
  c_basis->add_option("--d", b_d, "Twist / total degree")->required();
  c_basis->add_option("--prime,--field", b_field, "Prime p or Q");

  const std::vector<std::string> original = args;
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << FOLIA_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitMalformed;
  }

  try {
    if (*c_random) {
      const FieldSpec f = r_field.empty() ? default_field() : FieldSpec::parse(r_field);
      const DegreeVector d(parse_int_list(r_degrees));
      try {
        const auto text = with_field(f, [&]<class K>() {
          return params_to_json(random_params<K>(r_seed, r_n, r_q, d, f)).dump(2);
        });
        write_output(r_out, text, out);
        return kExitOk;
      } catch (const SamplingError& e) {
        return report_error(err, e, kExitPrecondition);
      } catch (const PreconditionError& e) {
        return report_error(err, e, kExitPrecondition);
      } catch (const UsageError& e) {
        return report_error(err, e, kExitPrecondition);
      }
    }

    if (*c_verify) {
      const json doc = read_json(v_path);
      std::optional<FieldSpec> flag;
      if (!v_field.empty()) flag = FieldSpec::parse(v_field);
      const FieldSpec f = params_field(doc, flag, default_field());
      return with_field(f, [&]<class K>() {
        const auto p = params_from_json<K>(doc, f);
        json res;
        PolyForm<K> omega;
        try {
          omega = construct_log_form(p);
        } catch (const DegenerateInputError& e) {
          err << "error: " << e.what() << '\n';
          return static_cast<int>(kExitNegative);
        }
        const bool descent = radial_contract(omega).is_zero() && p.lambdas_in_cmd();
        const bool pl = pluecker_check(omega, p.q);
        const bool integ = integrability_check(omega, p.q);
        const bool logdiff = logdiff_identity_check(p);
        res["descent"] = descent;
        res["pluecker"] = pl;
        res["integrability"] = integ;
        res["logdiff_identity"] = logdiff;
        res["genericity"] = p.q == 2 ? json(genericity_check(p.lambda_tensor())) : json(nullptr);
        res["balanced_k2"] = p.m() > 2 ? json(balanced_check(p.degrees, 2)) : json(nullptr);
        res["provenance"] = provenance("verify", original, p.seed, f);
        out << res.dump(2) << '\n';
        return (descent && pl && integ && logdiff) ? static_cast<int>(kExitOk) : static_cast<int>(kExitNegative);
      });
    }

    if (*c_certify) {
      const json doc = read_json(c_path);
      std::vector<FieldSpec> fields;
      if (!c_primes.empty()) fields = parse_field_list(c_primes);
      else fields.push_back(params_field(doc, std::nullopt, default_field()));
      std::vector<StabilityReport> reports;
      json rendered = json::array();
      try {
        for (const auto& f : fields) {
          auto rep = with_field(f, [&]<class K>() {
            const auto p = params_from_json<K>(doc, f);
            CertifyOptions opt;
            opt.dual_directions = c_directions;
            opt.throw_on_sanity_failure = false;
            return certify_stability(p, opt);
          });
          json j = report_to_json(rep);
          j["provenance"] = provenance("certify", original, rep.seed, f);
          rendered.push_back(j);
          reports.push_back(std::move(rep));
        }
      } catch (const PreconditionError& e) {
        return report_error(err, e, kExitPrecondition);
      } catch (const DegenerateInputError& e) {
        return report_error(err, e, kExitPrecondition);
      }
      bool agree = true;
      for (const auto& r : reports)
        agree = agree && r.ker_dim == reports.front().ker_dim && r.drho_rank == reports.front().drho_rank;
      json result = rendered.size() == 1 ? rendered[0] : json{{"reports", rendered}, {"agree", agree}};
      write_output(c_out, result.dump(2), out);

      bool sane = true, stable = true, silent = false;
      for (const auto& r : reports) {
        sane = sane && r.sanity_ok();
        stable = stable && r.stable;
        silent = silent || r.theorem_silent;
      }
      if (!sane) {
        err << "error: sanity check failed; see the report\n";
        return kExitSanity;
      }
      if (silent) err << "warning: degrees are not 2-balanced; no stability claim applies\n";
      if (!agree) err << "warning: ranks differ between fields\n";
      return (stable && !silent && agree) ? kExitOk : kExitNegative;
    }

    if (*c_scan) {
      const json cfg = read_json(s_config);
      std::vector<ScanTask> tasks;
      std::size_t directions = 10;
      try {
        if (cfg.contains("directions")) directions = cfg.at("directions").get<std::size_t>();
        const auto seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
        std::vector<FieldSpec> fields;
        if (cfg.contains("primes")) {
          for (const auto& pj : cfg.at("primes"))
            fields.push_back(pj.is_string() ? FieldSpec::parse(pj.get<std::string>()) : FieldSpec::prime_field(pj.get<std::uint64_t>()));
        } else {
          fields.push_back(default_field());
        }
        for (const auto& inst : cfg.at("instances")) {
          const int n = inst.at("n").get<int>();
          const auto d = inst.at("degrees").get<std::vector<int>>();
          for (auto seed : seeds)
            for (const auto& f : fields) tasks.push_back({n, d, seed, f, scan_key(n, d, seed, f)});
        }
      } catch (const json::exception& e) {
        throw ParseError(std::string("bad scan configuration: ") + e.what());
      }

      std::set<std::string> done;
      if (std::ifstream prev(s_out); prev) {
        std::string line;
        while (std::getline(prev, line)) {
          if (line.empty()) continue;
          try {
            const auto j = json::parse(line);
            if (j.contains("key")) done.insert(j.at("key").get<std::string>());
          } catch (const json::exception&) {
            // a torn last line from an interrupted run; that key is simply redone
          }
        }
      }
      std::vector<ScanTask> todo;
      for (const auto& t : tasks)
        if (!done.count(t.key)) todo.push_back(t);

      std::ofstream sink(s_out, std::ios::app);
      if (!sink) throw UsageError("cannot append to '" + s_out + "'");

      std::vector<std::optional<json>> results(todo.size());
      std::mutex mu;
      std::condition_variable cv;
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
          json r = run_scan_task(todo[i], directions);
          {
            std::lock_guard<std::mutex> lock(mu);
            results[i] = std::move(r);
          }
          cv.notify_all();
        }
      };
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < std::max(1u, s_jobs); ++w) pool.emplace_back(worker);
      std::size_t errors = 0;
      for (std::size_t i = 0; i < todo.size(); ++i) {
        json line;
        {
          std::unique_lock<std::mutex> lock(mu);
          cv.wait(lock, [&] { return results[i].has_value(); });
          line = std::move(*results[i]);
        }
        if (line.contains("error")) ++errors;
        sink << line.dump() << '\n';
        sink.flush();
      }
      for (auto& t : pool) t.join();

      // Agreement across seeds and fields, over the whole file.
      std::map<std::string, std::set<std::pair<std::size_t, std::size_t>>> by_instance;
      std::ifstream all(s_out);
      for (std::string line; std::getline(all, line);) {
        if (line.empty()) continue;
        json j;
        try {
          j = json::parse(line);
        } catch (const json::exception&) {
          continue;
        }
        if (!j.contains("report")) continue;
        const auto& r = j.at("report");
        std::string inst = "n=" + std::to_string(j.at("n").get<int>()) + ";d=" + j.at("degrees").dump();
        by_instance[inst].insert({r.at("ker_dim").get<std::size_t>(), r.at("drho_rank").get<std::size_t>()});
      }
      json disagreements = json::array();
      for (const auto& [inst, vals] : by_instance)
        if (vals.size() > 1) disagreements.push_back(inst);
      json summary{{"tasks", tasks.size()},
                   {"skipped", tasks.size() - todo.size()},
                   {"completed", todo.size()},
                   {"errors", errors},
                   {"rank_disagreements", disagreements}};
      out << summary.dump() << '\n';
      return kExitOk;
    }

    if (*c_basis) {
      const FieldSpec f = b_field.empty() ? default_field() : FieldSpec::parse(b_field);
      try {
        return with_field(f, [&]<class K>() {
          const FormBasis<K> basis(b_n, b_q, b_d, f);
          json res{{"n", b_n},
                   {"q", b_q},
                   {"d", b_d},
                   {"field", field_to_json(f)},
                   {"dim", basis.dim()},
                   {"bott", bott_dimension(b_n, b_q, b_d)},
                   {"bott_agrees", basis.dim() == bott_dimension(b_n, b_q, b_d)}};
          out << res.dump(2) << '\n';
          return static_cast<int>(kExitOk);
        });
      } catch (const UsageError& e) {
        return report_error(err, e, kExitPrecondition);
      }
    }
  } catch (const ParseError& e) {
    return report_error(err, e, kExitMalformed);
  } catch (const UsageError& e) {
    return report_error(err, e, kExitMalformed);
  } catch (const ConsistencyError& e) {
    return report_error(err, e, kExitSanity);
  } catch (const std::exception& e) {
    return report_error(err, e, kExitMalformed);
  }
  return kExitMalformed;
}

}  // namespace folia
