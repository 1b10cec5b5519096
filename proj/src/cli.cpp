#include "keyguess/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "keyguess/cipher.hpp"
#include "keyguess/compression.hpp"
#include "keyguess/errors.hpp"
#include "keyguess/exponents.hpp"
#include "keyguess/kernels.hpp"
#include "keyguess/verify.hpp"

namespace keyguess {
namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return v;
      },
      c);
}

json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<T, double>) {
          if (std::isfinite(v)) return v;
          return format_double(v);
        } else return v;
      },
      c);
}

bool is_iid(const SourceModel& m) { return std::holds_alternative<IidSource>(m); }

std::size_t small_alphabet(const SourceModel& m) { return alphabet_size(m); }

Cell optional_value(bool present, double v) { return present ? Cell{v} : Cell{}; }

long long as_ll(std::size_t v) { return static_cast<long long>(v); }

}  // namespace

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

void write_json(const Table& t, std::ostream& out) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(r));
  }
  json doc = {{"command", t.command}, {"columns", t.columns}, {"rows", rows}};
  out << doc.dump(2) << '\n';
}

Table cmd_exponent(const RunConfig& cfg) {
  Table t{"exponent",
          {"rho", "R", "E", "theta", "branch", "H_P", "H_prime", "E_max", "asymptotic", "grid_E"},
          {}};
  const auto rates = cfg.rate_values();
  const bool iid = is_iid(cfg.model);
  const auto* markov = std::get_if<MarkovSource>(&cfg.model);
  const bool grid = cfg.grid_check && (iid || markov) && small_alphabet(cfg.model) <= kGridMaxAlphabet;
  for (double rho : cfg.rhos) {
    const ExponentCurve curve = exponent_curve(cfg.model, rho, rates);
    std::vector<double> grid_values(rates.size(), 0.0);
    if (grid) {
      kernels::omp::for_each_index(rates.size(), [&](std::size_t i) {
        grid_values[i] = iid ? iid_exponent_grid(std::get<IidSource>(cfg.model).marginal.probs(),
                                                 rho, rates[i])
                                   .value
                             : markov_exponent_grid(markov->transition, rho, rates[i]).value;
      });
    }
    for (std::size_t i = 0; i < rates.size(); ++i) {
      const auto& s = curve.samples[i];
      t.rows.push_back({rho, s.rate, s.value, s.theta, to_string(s.branch), curve.h_p,
                        curve.h_prime, curve.e_max, curve.asymptotic,
                        optional_value(grid, grid_values[i])});
    }
  }
  return t;
}

Table cmd_bounds(const RunConfig& cfg) {
  Table t{"bounds",
          {"n", "rho", "R", "N", "lower", "lower_slack", "relaxed", "fixed_kernel", "upper",
           "upper_slack", "dual", "gap", "ok"},
          {}};
  const auto rates = cfg.rate_values();
  for (unsigned n : cfg.block_lengths) {
    const Pmf p = materialize(cfg.model, n, cfg.materialize_cap);
    for (double rho : cfg.rhos)
      for (double rate : rates) {
        const FiniteBound lo = lower_bound_finite(p.probs(), n, rho, rate);
        const SaturatedOptimum mid = relaxed_optimum(p.probs(), n, rho, rate);
        const FiniteBound hi = upper_bound_finite(p.probs(), n, rho, rate);
        const double kernel = fixed_set_kernel(p.probs(), n, rho, rate);
        const double dual = exponent_dual(cfg.model, rho, rate).value;
        const double tol = 1e-12;
        const bool ok = lo.value - lo.slack <= mid.value + tol && mid.value <= hi.value + tol;
        t.rows.push_back({static_cast<long long>(n), rho, rate, as_ll(p.size()), lo.value,
                          lo.slack, mid.value, kernel, hi.value, hi.slack, dual,
                          std::abs(mid.value - dual), ok});
      }
  }
  return t;
}

Table cmd_simulate(const RunConfig& cfg) {
  Table t{"simulate",
          {"n", "rho", "R", "k", "N", "moment", "closed_form", "exponent", "compression",
           "compression_kind", "equivalence_slack", "within_slack", "bf_max", "bracket_lo",
           "bracket_hi", "bracket_width"},
          {}};
  const auto rates = cfg.rate_values();
  for (unsigned n : cfg.block_lengths) {
    const Pmf p = materialize(cfg.model, n, cfg.materialize_cap);
    for (double rho : cfg.rhos)
      for (double rate : rates) {
        const AchievedExponent a = guessing_exponent_achieved(cfg.model, n, rho, rate);
        const double moment = std::exp(a.log_moment);
        const double closed = group_xor_moment_closed(p.probs(), a.key_bits, rho);
        const bool exact = p.size() <= kIntegerBruteForceMax;
        const double es = exact ? integer_bruteforce(p.probs(), rho, rate, n).value
                                : relaxed_optimum(p.probs(), n, rho, rate).value;
        const bool within = std::abs(a.value - es) <= a.equivalence_slack;
        std::vector<Cell> row{static_cast<long long>(n), rho, rate,
                              static_cast<long long>(a.key_bits), as_ll(p.size()), moment,
                              closed, a.value, es, std::string(exact ? "integer" : "relaxed"),
                              a.equivalence_slack, within};
        if (p.size() <= std::min(cfg.bruteforce_messages, kBruteForceMaxMessages) &&
            a.key_bits <= kBruteForceMaxKeyBits) {
          const double bf = brute_force_best_cipher(p.probs(), a.key_bits, rho).max_moment;
          const double lo = std::log(std::min(bf, moment)) / n;
          const double hi = std::log(std::max(bf, moment)) / n;
          row.insert(row.end(), {bf, lo, hi, hi - lo});
        } else {
          row.insert(row.end(), {Cell{}, Cell{}, Cell{}, Cell{}});
        }
        t.rows.push_back(std::move(row));
      }
  }
  return t;
}

Table cmd_sweep(const RunConfig& cfg) {
  Table t{"sweep",
          {"rho", "R", "E", "branch", "error_branch", "correct_branch", "decomposition_gap"},
          {}};
  const auto rates = cfg.rate_values();
  const bool iid = is_iid(cfg.model);
  for (double rho : cfg.rhos) {
    const ExponentCurve curve = exponent_curve(cfg.model, rho, rates);
    for (const auto& s : curve.samples) {
      std::vector<Cell> row{rho, s.rate, s.value, to_string(s.branch)};
      if (iid) {
        const auto p1 = std::get<IidSource>(cfg.model).marginal.probs();
        const double err = iid_error_exponent(p1, s.rate);
        const double first = std::isinf(err) ? -INFINITY : rho * s.rate - err;
        const double correct = iid_correct_term(p1, rho, s.rate);
        row.insert(row.end(), {first, correct, std::abs(std::max(first, correct) - s.value)});
      } else {
        row.insert(row.end(), {Cell{}, Cell{}, Cell{}});
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table cmd_verify(const RunConfig& cfg, bool& all_pass) {
  Table t{"verify", {"check", "cases", "worst", "tolerance", "pass"}, {}};
  all_pass = true;
  for (const auto& r : run_verification(cfg.seed, cfg.tolerance_scale)) {
    all_pass = all_pass && r.pass;
    t.rows.push_back({r.name, as_ll(r.cases), r.worst, r.tolerance, r.pass});
  }
  return t;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Guessing exponents of the Shannon cipher system with a key-rate-limited attacker"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_path;
  std::string format;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  for (const char* name : {"exponent", "bounds", "simulate", "sweep", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required(std::string(name) != "verify");
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; seed_given = true; }, "random seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    else cfg = config_from_json(json::object());
    cfg.command = command;
    if (!out_path.empty()) cfg.out = out_path;
    if (!format.empty()) cfg.format = format;
    if (threads > 0) cfg.threads = threads;
    if (seed_given) cfg.seed = seed;
    set_thread_count(cfg.threads);

    Table table;
    bool pass = true;
    if (command == "exponent") table = cmd_exponent(cfg);
    else if (command == "bounds") table = cmd_bounds(cfg);
    else if (command == "simulate") table = cmd_simulate(cfg);
    else if (command == "sweep") table = cmd_sweep(cfg);
    else table = cmd_verify(cfg, pass);

    std::ostringstream buffer;
    if (cfg.format == "json") write_json(table, buffer);
    else write_csv(table, buffer);
    if (cfg.out.empty()) {
      out << buffer.str();
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw ValidationError("cannot write " + cfg.out);
      f << buffer.str();
    }
    if (!pass) {
      for (const auto& row : table.rows)
        if (!std::get<bool>(row.back()))
          err << "verify: " << std::get<std::string>(row.front()) << " failed (worst "
              << csv_cell(row[2]) << ", tolerance " << csv_cell(row[3]) << ", seed " << cfg.seed
              << ")\n";
      return kExitVerifyFailed;
    }
    return kExitOk;
  } catch (const SizeError& e) {
    err << "cap exceeded: " << e.what() << '\n';
    return kExitCap;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace keyguess
