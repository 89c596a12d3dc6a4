#include <iostream>

#include "CLI11.hpp"
#include "qhyper/cli/commands.hpp"

namespace qhyper::cli {

namespace {

const char* describe(const std::string& name) {
  if (name == "relations") return "Commutation relations and generator norms";
  if (name == "density") return "Vacuum density: closed form, linear solve, state identities";
  if (name == "lpnorm") return "Haagerup L^p norms of the generators";
  if (name == "choi") return "Choi matrix positivity of the single-index semigroup";
  if (name == "convexity") return "Uniform convexity inequalities on random matrix pairs";
  if (name == "hyperc-verify") return "Search for contraction violations at the sufficient time";
  if (name == "hyperc-search") return "Best contraction ratio over a time grid";
  if (name == "necessary-time") return "Optimality thresholds and the 1 + eps gamma witness";
  if (name == "perturb") return "Second-order expansion of ||(1 + eps gamma) D^(1/p)||_p^p";
  if (name == "fock-moment") return "q-Fock moments from two independent evaluators";
  if (name == "clt") return "Monte-Carlo central limit against the q-Fock moment";
  return "";
}

void add_common(CLI::App& sub, RunConfig& c) {
  sub.add_option("--n", c.n, "Number of gaussian indices");
  sub.add_option("--mu", c.mu, "Weights mu_i >= 1: list a,b,c or grid start:stop:step");
  sub.add_option("--sign-seed", c.sign_seed, "Seed of the random sign table");
  sub.add_option("--sign-file", c.sign_file, "JSON sign table {\"n\":..,\"pairs\":[[k,l,s],..]}");
  sub.add_option("--p", c.p, "Exponent grid");
  sub.add_option("--t", c.t, "Time grid");
  sub.add_option("--q", c.q, "Deformation grid");
  sub.add_option("--m", c.m, "Copy-count grid for the central limit");
  sub.add_option("--samples", c.samples, "Sample count");
  sub.add_option("--restarts", c.restarts, "Search restarts");
  sub.add_option("--iterations", c.iterations, "Ascent iterations per restart");
  sub.add_option("--seed", c.seed, "Master seed");
  sub.add_option("--emit", c.emit, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub.add_option("--tol", c.tol, "Tolerance override");
  sub.add_option("--word", c.word, "Polynomial such as \"(g+g*)^4\"");
  sub.add_option("--direction", c.direction, "forward, dual or both");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for hypercontractivity in twisted baby Fock models", "qhyper"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  RunConfig config;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    add_common(*sub, config);
    sub->callback([&config, name] { config.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 writes help and version to the given streams; everything else is a usage error.
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  CommandResult result;
  try {
    result = run_command(config);
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConstructionError& e) {
    err << "internal check failed: " << e.what() << "\n";
    return kAssertion;
  }

  out << (config.emit == "json" ? to_json(config, result) : to_csv(config, result));
  if (result.pass()) return kPass;
  CommandResult failing;
  for (const Record& r : result.records)
    if (!r.pass) failing.records.push_back(r);
  err << "assertion failure in " << failing.records.size() << " record(s):\n" << to_csv(config, failing);
  return kAssertion;
}

}  // namespace qhyper::cli
