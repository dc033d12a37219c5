// knds: command-line front end. Option resolution is
//   built-in defaults < command defaults < --config FILE < flags
// and the resolved values are embedded in every output.
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "knds/acceptance.hpp"
#include "knds/errors.hpp"

using namespace knds;
using knds::cli::ojson;

namespace {

enum class Kind { Num, Int, Seed, Str, List };

struct OptSpec {
  const char* name;
  Kind kind;
  const char* help;
};

const OptSpec kOptions[] = {
    {"mass", Kind::Num, "black-hole mass M"},
    {"charge-e", Kind::Num, "electric charge Q_e"},
    {"charge-m", Kind::Num, "magnetic charge Q_m"},
    {"lambda", Kind::Num, "cosmological constant"},
    {"spin", Kind::Num, "rotation parameter a (classify only)"},
    {"l", Kind::Int, "angular momentum (qnm-scan: highest l scanned)"},
    {"sector", Kind::Str, "scalar | vector | spherical (qnm-scan also: all)"},
    {"branch", Kind::Str, "plus | minus | maxwell | wave | eigen-plus | eigen-minus"},
    {"window", Kind::List, "resonance window reLo,reHi,imLo,imHi (pass as --window=...)"},
    {"grid", Kind::Int, "grid size: cells per axis, radii, contour points or Chebyshev nodes"},
    {"tol", Kind::Num, "tolerance"},
    {"rng-seed", Kind::Seed, "seed for random draws"},
    {"lambda-range", Kind::List, "classify: Lambda range lo,hi"},
    {"charge-range", Kind::List, "classify: charge range lo,hi"},
    {"gammas", Kind::List, "damping: gamma3 values"},
    {"draws", Kind::Int, "subpr: random draws per matrix"},
    {"seed-kind", Kind::Str, "initdata: zero | bump | charge | mixed"},
    {"seed-amp", Kind::Num, "initdata: seed amplitude"},
};

const OptSpec* find_spec(const std::string& name) {
  for (const auto& s : kOptions)
    if (name == s.name) return &s;
  return nullptr;
}

ojson command_defaults(const std::string& cmd) {
  ojson d{{"mass", 1.0}, {"charge-e", 0.5}, {"charge-m", 0.0}, {"lambda", 0.02}, {"spin", 0.0}, {"rng-seed", 20240611}};
  auto add = [&](ojson more) {
    for (auto it = more.begin(); it != more.end(); ++it) d[it.key()] = it.value();
  };
  if (cmd == "classify") add({{"grid", 200}, {"lambda-range", {0.0, 0.25}}, {"charge-range", {0.0, 2.0}}});
  if (cmd == "potentials") add({{"sector", "scalar"}, {"l", 2}, {"branch", nullptr}, {"grid", 512}});
  if (cmd == "qnm-scan") add({{"sector", "all"}, {"l", 3}, {"branch", nullptr}, {"window", nullptr}, {"grid", 128}});
  if (cmd == "damping") add({{"gammas", {0.005, 0.01, 0.02}}});
  if (cmd == "subpr") add({{"draws", 1000}, {"tol", 1e-8}});
  if (cmd == "initdata") add({{"grid", 256}, {"tol", 1e-9}, {"seed-kind", "bump"}, {"seed-amp", 1e-3}});
  return d;
}

std::string default_format(const std::string& cmd) {
  if (cmd == "qnm-scan" || cmd == "damping" || cmd == "initdata") return "json";
  if (cmd == "verify") return "text";
  return "csv";
}

double parse_real(const std::string& flag, const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || errno == ERANGE) throw UsageError("--" + flag + ": not a number: '" + s + "'");
  return x;
}

long long parse_int(const std::string& flag, const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno == ERANGE) throw UsageError("--" + flag + ": not an integer: '" + s + "'");
  return x;
}

ojson parse_flag(const OptSpec& spec, const std::string& s) {
  switch (spec.kind) {
    case Kind::Num: return parse_real(spec.name, s);
    case Kind::Int: return parse_int(spec.name, s);
    case Kind::Seed: {
      const long long v = parse_int(spec.name, s);
      if (v < 0) throw UsageError("--rng-seed must be nonnegative");
      return std::uint64_t(v);
    }
    case Kind::Str: return s;
    case Kind::List: {
      ojson a = ojson::array();
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) a.push_back(parse_real(spec.name, item));
      return a;
    }
  }
  return nullptr;
}

// config-file values must have the same JSON type a flag would produce
ojson check_config_value(const OptSpec& spec, const ojson& v) {
  const bool ok = v.is_null() || (spec.kind == Kind::Num && v.is_number()) ||
                  ((spec.kind == Kind::Int || spec.kind == Kind::Seed) && v.is_number_integer()) ||
                  (spec.kind == Kind::Str && v.is_string()) || (spec.kind == Kind::List && v.is_array());
  if (!ok) throw UsageError(std::string("config: wrong type for '") + spec.name + "'");
  if (spec.kind == Kind::Num && !v.is_null()) return v.get<double>();
  return v;
}

int parse_jobs(const std::string& where, const std::string& s) {
  const long long j = parse_int("jobs", s);
  if (j < 1 || j > 1024) throw UsageError(where + ": jobs must be in 1..1024");
  return int(j);
}

void emit_error(const std::string& command, const std::string& kind, const std::string& msg, int code) {
  const ojson j{{"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}, {"command", command}, {"knds_version", version()}}}};
  std::cerr << j.dump() << "\n";
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::fwrite(bytes.data(), 1, bytes.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), std::streamsize(bytes.size()));
  f.close();
  if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr-Newman-de Sitter spectral toolkit"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);

  std::map<std::string, std::string> flagvals;
  for (const auto& s : kOptions) app.add_option(std::string("--") + s.name, flagvals[s.name], s.help);
  std::string jobs_s, out, format, config;
  app.add_option("--jobs", jobs_s, "worker threads (default: $KNDS_SPECTRAL_JOBS or 1)");
  app.add_option("--out", out, "output path (default: stdout)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--config", config, "JSON config file; flags override its values");

  const std::pair<const char*, const char*> subs[] = {
      {"classify", "non-degeneracy verdicts and horizons over a (Lambda, Q) grid"},
      {"potentials", "tabulate master-equation potentials on (r-, r+)"},
      {"qnm-scan", "count resonances in a window by the argument principle"},
      {"damping", "constraint-damping resonance sigma(gamma3)"},
      {"subpr", "audit subprincipal spectra on random draws"},
      {"initdata", "solve the conformal constraint equations on an RNdS slice"},
      {"verify", "run the identity suite (acceptance criteria 1-9)"},
  };
  for (auto [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

  std::string command = "?";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(command, "UsageError", e.what(), exit_code::usage);
    return exit_code::usage;
  }
  command = app.get_subcommands().front()->get_name();

  try {
    cli::RunConfig c;
    c.command = command;
    c.values = command_defaults(command);
    c.format = default_format(command);
    c.jobs = 1;
    if (const char* env = std::getenv("KNDS_SPECTRAL_JOBS"); env && *env) c.jobs = parse_jobs("KNDS_SPECTRAL_JOBS", env);

    if (!config.empty()) {
      std::ifstream f(config);
      if (!f) throw IoError("cannot read config file '" + config + "'");
      ojson j;
      try {
        j = ojson::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
      if (!j.is_object()) throw UsageError("config: top level must be an object");
      for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "jobs") {
          if (!it.value().is_number_integer()) throw UsageError("config: jobs must be an integer");
          c.jobs = parse_jobs("config", std::to_string(it.value().get<long long>()));
        } else if (k == "out" || k == "format") {
          if (!it.value().is_string()) throw UsageError("config: " + k + " must be a string");
          (k == "out" ? c.out : c.format) = it.value().get<std::string>();
        } else if (const auto* spec = find_spec(k)) {
          c.values[k] = check_config_value(*spec, it.value());
        } else {
          throw UsageError("config: unknown key '" + k + "'");
        }
      }
    }
    for (const auto& s : kOptions)
      if (app.count(std::string("--") + s.name)) c.values[s.name] = parse_flag(s, flagvals[s.name]);
    if (app.count("--jobs")) c.jobs = parse_jobs("--jobs", jobs_s);
    if (app.count("--out")) c.out = out;
    if (app.count("--format")) c.format = format;
    if (c.format != "csv" && c.format != "json" && !(command == "verify" && c.format == "text"))
      throw UsageError("--format must be csv or json");

    cli::Output o;
    if (command == "classify") o = cli::cmd_classify(c);
    else if (command == "potentials") o = cli::cmd_potentials(c);
    else if (command == "qnm-scan") o = cli::cmd_qnm_scan(c);
    else if (command == "damping") o = cli::cmd_damping(c);
    else if (command == "subpr") o = cli::cmd_subpr(c);
    else if (command == "initdata") o = cli::cmd_initdata(c);
    else o = cli::cmd_verify(c);
    write_output(c.out, o.bytes);
    return o.code;
  } catch (const Error& e) {
    emit_error(command, e.kind(), e.what(), e.exit_code());
    return e.exit_code();
  } catch (const std::exception& e) {
    emit_error(command, "InternalError", e.what(), exit_code::numerical);
    return exit_code::numerical;
  }
}
