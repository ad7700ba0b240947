#pragma once

// Command-line front end. Exit codes: 0 success, 1 verify rejected the
// point, 2 bad input or usage, 3 audit left some class indeterminate.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unargmax/error.hpp"
#include "unargmax/experiments.hpp"
#include "unargmax/geometry.hpp"
#include "unargmax/model_io.hpp"
#include "unargmax/pipeline.hpp"
#include "unargmax/region_count.hpp"
#include "unargmax/report.hpp"
#include "unargmax/version.hpp"

namespace unargmax::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitIndeterminate = 3;

inline std::vector<double> parse_floats(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ParseError("cannot parse '" + item + "' as a number");
    }
    if (used != item.size()) throw ParseError("cannot parse '" + item + "' as a number");
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty point");
  return out;
}

struct AuditArgs {
  std::string weights, bias, vocab, out, csv, witnesses;
  double bound = kDefaultBound;
  long patience = kDefaultPatience;
  unsigned threads = 0;
  std::string mode = "combined";
  std::vector<std::string> scripts;
  bool drop_digits_punct = false;
  bool keep_special = true;
};

struct CountArgs {
  int classes = 0, dim = 0, max_classes = 10, max_dim = 10;
  bool bias = false, table = false;
};

struct RandomArgs {
  long classes = 1000;
  std::vector<long> dims;
  std::vector<std::uint64_t> seeds;
  bool bias = false;
  std::string out;
  double bound = kDefaultBound;
  long patience = kDefaultPatience;
  unsigned threads = 0;
};

struct VerifyArgs {
  std::string weights, bias, point;
  long cls = 0;
  double bound = kDefaultBound;
};

inline std::optional<std::filesystem::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

inline int run_audit(const AuditArgs& a, std::ostream& out) {
  SoftmaxSpec spec = load_spec(a.weights, opt_path(a.bias), opt_path(a.vocab));
  std::optional<TokenFilter> filter;
  if (!a.scripts.empty() || a.drop_digits_punct) {
    TokenFilter f;
    f.allowed_scripts.insert(a.scripts.begin(), a.scripts.end());
    f.drop_digits_punct = a.drop_digits_punct;
    f.keep_special = a.keep_special;
    filter = f;
  }
  AuditConfig cfg;
  cfg.box = Box(a.bound);
  cfg.patience = a.patience;
  cfg.threads = a.threads;
  cfg.mode = parse_mode(a.mode);
  cfg.keep_witnesses = !a.witnesses.empty();
  const AuditReport report = audit(spec, filter, cfg);
  write_report(report, opt_path(a.out), opt_path(a.csv), opt_path(a.witnesses));

  const auto& s = report.summary;
  out << "model: " << report.name << " (|C|=" << report.classes << ", d=" << report.dim
      << (report.has_bias ? ", bias" : ", no bias") << ")\n"
      << "audited: " << report.statuses.size() << "\n"
      << "argmaxable (approx): " << s.argmaxable_approx << "\n"
      << "argmaxable (exact): " << s.argmaxable_exact << "\n"
      << "potentially unargmaxable: " << s.potentially_unargmaxable << "\n"
      << "unargmaxable: " << s.unargmaxable << "\n"
      << "indeterminate: " << s.indeterminate << "\n";
  for (const auto& st : report.statuses) {
    if (st.status == StatusKind::Unargmaxable) {
      out << "  unargmaxable " << st.index;
      if (st.token) out << " " << nlohmann::json(*st.token).dump();
      out << " (" << st.reason_string() << ")\n";
    }
  }
  return s.indeterminate > 0 ? kExitIndeterminate : kExitOk;
}

inline int run_count(const CountArgs& a, std::ostream& out) {
  if (!a.table) {
    if (a.classes == 0 || a.dim == 0) throw DomainError("count needs --classes and --dim (or --table)");
    out << count_regions(a.classes, a.dim, a.bias) << "\n";
    return kExitOk;
  }
  const auto grid = a.bias ? with_bias_table(a.max_classes, a.max_dim) : no_bias_table(a.max_classes, a.max_dim);
  out << "classes";
  for (int d = 1; d <= a.max_dim; ++d) out << "\t" << "d=" << d;
  out << "\n";
  for (int n = 2; n <= a.max_classes; ++n) {
    out << n;
    for (int d = 1; d <= a.max_dim; ++d) out << "\t" << grid[static_cast<std::size_t>(n)][static_cast<std::size_t>(d)];
    out << "\n";
  }
  return kExitOk;
}

inline int run_random(const RandomArgs& a, std::ostream& out) {
  if (a.dims.empty() || a.seeds.empty()) throw DomainError("random needs --dims and --seeds");
  std::vector<Index> dims(a.dims.begin(), a.dims.end());
  AuditConfig cfg;
  cfg.box = Box(a.bound);
  cfg.patience = a.patience;
  cfg.threads = a.threads;
  const ExperimentTable table = sweep_dims(a.classes, dims, a.bias, a.seeds, cfg);
  const std::string csv = experiment_to_csv(table);
  if (a.out.empty()) {
    out << csv;
  } else {
    detail::write_text(a.out, csv);
    nlohmann::json meta = {{"generator", table.generator}, {"bound", a.bound}, {"patience", a.patience},
                           {"tool_version", kToolVersion}};
    detail::write_text(a.out + ".meta.json", meta.dump(2) + "\n");
    out << "wrote " << table.rows.size() << " rows to " << a.out << "\n";
  }
  return kExitOk;
}

inline int run_verify(const VerifyArgs& a, std::ostream& out) {
  SoftmaxSpec spec = load_spec(a.weights, opt_path(a.bias));
  check_target(spec, a.cls);
  const auto values = parse_floats(a.point);
  if (static_cast<Index>(values.size()) != spec.dim()) {
    throw ShapeError("point has " + std::to_string(values.size()) + " coordinates, expected " +
                     std::to_string(spec.dim()));
  }
  const Vector x = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  const Box box(a.bound);
  if (check_witness(spec, a.cls, x, box)) {
    out << "witness valid\n";
    return kExitOk;
  }
  const auto am = strict_argmax(logits(spec, x));
  out << "witness invalid: ";
  if (!box.contains(x)) {
    out << "point outside the box of bound " << a.bound << "\n";
  } else if (am.is_tie()) {
    out << "the maximum logit is tied\n";
  } else {
    out << "class " << *am.winner << " wins\n";
  }
  return kExitRejected;
}

// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Certify which classes of a Softmax output layer can be the argmax", "unargmax"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  AuditArgs audit_args;
  auto* audit_cmd = app.add_subcommand("audit", "Audit every (filtered) class of a layer");
  audit_cmd->add_option("--weights", audit_args.weights, "NPY weight matrix, |C| x d")->required();
  audit_cmd->add_option("--bias", audit_args.bias, "NPY bias vector, length |C|");
  audit_cmd->add_option("--vocab", audit_args.vocab, "JSON vocabulary {name, tokens}");
  audit_cmd->add_option("--bound", audit_args.bound, "Box bound B on every input coordinate")->capture_default_str();
  audit_cmd->add_option("--patience", audit_args.patience, "Reflection steps before escalating")->capture_default_str();
  audit_cmd->add_option("--threads", audit_args.threads, "Worker threads (0 = all cores)");
  audit_cmd->add_option("--mode", audit_args.mode, "combined | approx-only | exact-only")
      ->check(CLI::IsMember({"combined", "approx-only", "exact-only"}))
      ->capture_default_str();
  audit_cmd->add_option("--filter-script", audit_args.scripts, "Keep tokens written in this script (repeatable)");
  audit_cmd->add_flag("--drop-digits-punct", audit_args.drop_digits_punct, "Skip tokens with digits or punctuation");
  audit_cmd->add_flag("--keep-special,!--no-keep-special", audit_args.keep_special,
                      "Always keep <...> special tokens (default on)");
  audit_cmd->add_option("--out", audit_args.out, "JSON report path");
  audit_cmd->add_option("--csv", audit_args.csv, "CSV report path");
  audit_cmd->add_option("--witnesses", audit_args.witnesses, "NPY witness matrix path (+ .json row index)");

  CountArgs count_args;
  auto* count_cmd = app.add_subcommand("count", "Number of feasible class rankings");
  count_cmd->add_option("--classes", count_args.classes, "Number of classes n");
  count_cmd->add_option("--dim", count_args.dim, "Input dimension d");
  count_cmd->add_flag("--bias", count_args.bias, "Layer has a bias term");
  count_cmd->add_flag("--table", count_args.table, "Print the full grid");
  count_cmd->add_option("--max-classes", count_args.max_classes, "Grid rows 2..N")->capture_default_str();
  count_cmd->add_option("--max-dim", count_args.max_dim, "Grid columns 1..D")->capture_default_str();

  RandomArgs random_args;
  auto* random_cmd = app.add_subcommand("random", "Audit uniformly initialized layers across dimensions");
  random_cmd->add_option("--classes", random_args.classes, "Number of classes")->capture_default_str();
  random_cmd->add_option("--dims", random_args.dims, "Comma-separated dimensions")->delimiter(',')->required();
  random_cmd->add_option("--seeds", random_args.seeds, "Comma-separated seeds")->delimiter(',')->required();
  random_cmd->add_flag("--bias", random_args.bias, "Include a bias term");
  random_cmd->add_option("--out", random_args.out, "CSV output path (stdout if absent)");
  random_cmd->add_option("--bound", random_args.bound, "Box bound")->capture_default_str();
  random_cmd->add_option("--patience", random_args.patience, "Reflection steps")->capture_default_str();
  random_cmd->add_option("--threads", random_args.threads, "Worker threads (0 = all cores)");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Check that a point makes a class the strict argmax");
  verify_cmd->add_option("--weights", verify_args.weights, "NPY weight matrix")->required();
  verify_cmd->add_option("--bias", verify_args.bias, "NPY bias vector");
  verify_cmd->add_option("--class", verify_args.cls, "Class index")->required();
  verify_cmd->add_option("--point", verify_args.point, "Comma-separated coordinates")->required();
  verify_cmd->add_option("--bound", verify_args.bound, "Box bound")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }

  try {
    if (*audit_cmd) return run_audit(audit_args, out);
    if (*count_cmd) return run_count(count_args, out);
    if (*random_cmd) return run_random(random_args, out);
    if (*verify_cmd) return run_verify(verify_args, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IOError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace unargmax::cli
