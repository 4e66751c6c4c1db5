// simulate: run MU-MIMO traffic sweeps and write one CSV row per run.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mumimo/config.hpp"
#include "mumimo/harness.hpp"
#include "mumimo/overhead.hpp"

namespace {

void explain_overhead(std::ostream& os, const mumimo::SimConfig& base) {
  const auto& s = base.sounding;
  const std::size_t m = base.n_antennas;
  const auto b = mumimo::overhead_breakdown(s, m, base.framing.phy_header);
  auto line = [&](const char* name, double secs) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-22s %10.3f us\n", name, secs * 1e6);
    os << buf;
  };
  os << "cycle overhead for a group of " << m << " users\n";
  os << "  feedback per user      " << mumimo::feedback_bits_per_user(s) << " bits\n";
  line("NDP announcement", b.ndpa);
  line("NDP", b.ndp);
  line("feedback frames", b.feedback);
  line("report polls", b.polls);
  line("SIFS gaps", b.sifs);
  line("data PHY header", b.data_phy_header);
  line("block acks", b.block_acks);
  line("sounding subtotal", b.sounding());
  line("total", b.total());
  if (s.sounding_every_n_cycles > 1) {
    const auto plain = mumimo::overhead_breakdown(s, m, base.framing.phy_header, false);
    line("total without sounding", plain.total());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MU-MIMO downlink simulator under variable traffic"};
  std::string config_path;
  std::string figure_name;
  std::string out_path;
  std::string dump_dir;
  unsigned jobs = 0;
  bool explain = false;
  bool emit_default = false;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "Run configuration file (INI)")->check(CLI::ExistingFile);
  app.add_option("--figure", figure_name, "Preset sweep")->check(CLI::IsMember({"fig5", "fig6", "fig7"}));
  app.add_option("--out", out_path, "Results CSV (default: stdout)");
  app.add_option("--dump-cycles", dump_dir, "Directory for per-run cycle logs");
  app.add_option("--jobs", jobs, "Parallel runs")->check(CLI::Range(1u, 1024u));
  app.add_flag("--explain-overhead", explain, "Print the per-cycle overhead budget and exit");
  app.add_flag("--emit-default-config", emit_default, "Print the resolved configuration and exit");
  app.add_option("--set", overrides, "Override a setting: section.key=value (repeatable)");
  CLI11_PARSE(app, argc, argv);

  try {
    mumimo::ConfigTree tree;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw mumimo::ConfigError("--config", "cannot open " + config_path);
      tree = mumimo::parse_config(in);
    }
    for (const auto& o : overrides) mumimo::set_override(tree, o);

    std::optional<mumimo::Figure> figure;
    if (!figure_name.empty()) figure = mumimo::parse_figure(figure_name);
    mumimo::HarnessConfig cfg = mumimo::resolve_config(tree, figure);
    if (!out_path.empty()) cfg.out = out_path;
    if (!dump_dir.empty()) cfg.dump_cycles = dump_dir;
    if (jobs != 0) cfg.jobs = jobs;

    if (emit_default) {
      mumimo::write_config(std::cout, cfg);
      return 0;
    }
    if (explain) {
      cfg.spec.base.sounding.validate();
      explain_overhead(std::cout, cfg.spec.base);
      return 0;
    }

    mumimo::SweepOptions opt;
    opt.jobs = cfg.jobs;
    if (!cfg.dump_cycles.empty()) {
      std::filesystem::create_directories(cfg.dump_cycles);
      opt.dump_cycles = std::filesystem::path(cfg.dump_cycles);
    }
    const auto rows = mumimo::run_sweep(cfg.spec, opt);

    std::ostringstream csv;
    mumimo::write_results_csv(csv, rows);
    if (cfg.out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + cfg.out);
      f << csv.str();
    }
    return 0;
  } catch (const mumimo::ConfigError& e) {
    std::cerr << "simulate: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const mumimo::InvariantViolation& e) {
    std::cerr << "simulate: invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return 1;
  }
}
