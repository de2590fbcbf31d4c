#include "ffvc/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

// "a,b;c,d" -> point indices
std::vector<ffvc::Index> parse_points(const std::string& s, const ffvc::FieldParams& params) {
  std::string text = s;
  for (char& c : text)
    if (c == ';') c = '\n';
  return ffvc::parse_pointset(text, params).indices();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance graphs, prisms and VC-dimension of sphere classes over F_q^d"};
  app.require_subcommand(1);

  unsigned q = 7, d = 2, t = 1;
  std::string set = "full", cls = "two-param", format = "json", output, census, target, grid;
  ffvc::ExperimentConfig cfg;
  unsigned threads = 0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"sphere-size", "sphere sizes for every radius against the q^{d-1} window"},
      {"gamma", "chain counts Gamma_k and the discrepancy report"},
      {"prisms", "nondegenerate prism counts, formula vs enumeration"},
      {"bad-sets", "bad-set search over affinely nondegenerate prisms"},
      {"vc-dim", "VC-dimension of the sphere-intersection class"},
      {"witness", "prism-guided shattering witness"},
      {"pac-sweep", "ERM sample-complexity sweep"},
      {"verify", "every bound and identity on one (q, d, t)"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--q", q, "odd prime field size")->capture_default_str();
    sub->add_option("--d", d, "dimension")->capture_default_str();
    sub->add_option("--t", t, "radius parameter, nonzero mod q")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("-o,--output", output, "output file (default stdout)");
    sub->add_option("--threads", threads, "worker threads (default FFVC_THREADS or hardware)");
    sub->add_option("--max-prisms", cfg.max_prisms, "prism budget")->capture_default_str();
    sub->add_option("--time-budget", cfg.time_budget_ms, "milliseconds, 0 for none")->capture_default_str();
    if (name == "sphere-size" || name == "verify") {
      if (name == "verify") {
        sub->add_option("--samples", cfg.samples, "random instances per audit")->capture_default_str();
        sub->add_option("--max-hypotheses", cfg.max_hypotheses, "shatter-test budget")->capture_default_str();
      }
      continue;
    }
    sub->add_option("--set", set, "full | random:SIZE:SEED | file:PATH")->capture_default_str();
    if (name == "gamma") sub->add_option("--k", cfg.k, "chain length")->capture_default_str();
    if (name == "prisms") {
      sub->add_option("--n", cfg.n, "center size (default d)");
      sub->add_option("--samples", cfg.samples, "samples for the affine fraction")->capture_default_str();
    }
    if (name == "bad-sets") sub->add_option("--census", census, "points of B as \"a,b;c,d\"");
    if (name == "vc-dim" || name == "pac-sweep")
      sub->add_option("--class", cls, "two-param or one-param")->check(CLI::IsMember({"two-param", "one-param"}))->capture_default_str();
    if (name == "vc-dim") sub->add_option("--max-hypotheses", cfg.max_hypotheses, "shatter-test budget")->capture_default_str();
    if (name == "pac-sweep") {
      sub->add_option("--epsilon", cfg.epsilon)->capture_default_str();
      sub->add_option("--delta", cfg.delta)->capture_default_str();
      sub->add_option("--m-grid", grid, "comma-separated sample sizes");
      sub->add_option("--trials", cfg.trials)->capture_default_str();
      sub->add_flag("--band", cfg.confidence_band, "require the Wilson lower band to reach 1 - delta");
      sub->add_option("--target", target, "target centers as \"u1,u2;v1,v2\" (one point for one-param)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.params = ffvc::FieldParams::make(q, d, t);
    cfg.set = ffvc::SetSpec::parse(set);
    cfg.class_kind = ffvc::parse_class_kind(cls);
    cfg.format = format;
    cfg.output = output;
    if (!grid.empty()) {
      cfg.m_grid.clear();
      std::stringstream ss(grid);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.m_grid.push_back(std::stoull(item));
    }
    if (!census.empty()) cfg.census = parse_points(census, cfg.params);
    if (!target.empty()) {
      const auto pts = parse_points(target, cfg.params);
      if (pts.size() == 2) cfg.target = std::pair{pts[0], pts[1]};
      else if (pts.size() == 1) cfg.target = std::pair{pts[0], pts[0]};
      else throw ffvc::InvalidArgument("--target takes one or two points");
    }
    if (threads > 0) ffvc::set_thread_count(threads);

    const auto out = ffvc::run_command(cfg);
    const std::string text = format == "csv" ? out.record.to_csv() : out.record.to_json().dump(2) + "\n";
    if (output.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(output);
      if (!(f << text)) throw ffvc::IoError("cannot write '" + output + "'");
    }
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "ffvc: " << e.what() << "\n";
    return 2;
  }
}
