// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on
// any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mumimo/harness.hpp"

using namespace mumimo;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Seed-averaged metrics keyed by (agg, value).
struct Curve {
  std::map<std::pair<std::size_t, double>, double> thr, delay;
  std::vector<double> values;

  explicit Curve(const std::vector<SweepRow>& rows) {
    std::map<std::pair<std::size_t, double>, int> n;
    for (const auto& r : rows) {
      const auto k = std::make_pair(r.agg, r.value);
      thr[k] += r.metrics.aggregate_throughput / 1e6;
      delay[k] += r.metrics.delay_fraction;
      ++n[k];
      if (std::find(values.begin(), values.end(), r.value) == values.end()) values.push_back(r.value);
    }
    for (auto& [k, c] : n) {
      thr[k] /= c;
      delay[k] /= c;
    }
  }
  double t(std::size_t agg, double v) const { return thr.at({agg, v}); }
  double d(std::size_t agg, double v) const { return delay.at({agg, v}); }
};

// Goodput of a full backlogged cycle, laid out by hand in microseconds.
double closed_form_mbps(std::size_t agg) {
  const double subframe = 4 + 36 + 20 + 8 + 512 + 4;  // 584, already 4-aligned
  const double data_us = agg * subframe * 8 / 54.0;
  const double phy = 44, sifs = 16;
  const double ndpa = phy + 200 / 24.0, fb = phy + (224 + 584) / 24.0, poll = phy + 168 / 24.0,
               ba = phy + 256 / 24.0;
  const double sounding = ndpa + sifs + 44 + sifs + fb + 3 * (sifs + poll + sifs + fb);
  const double cycle_us = sounding + phy + data_us + 4 * (sifs + ba);
  return 4 * agg * 512 * 8 / cycle_us;
}

void ac1() {
  SimConfig cfg;
  cfg.n_users = 4;
  cfg.max_agg = 40;
  cfg.horizon = 10.0;
  cfg.warmup = 1.0;
  assign_uniform_traffic(cfg, TrafficSource{});
  const double sim = run(cfg).metrics.aggregate_throughput / 1e6;
  const double want = closed_form_mbps(40);
  const double err = std::abs(sim / want - 1.0);
  report("AC1", err < 1e-3, fmt("simulated %.4f Mb/s vs closed form %.4f Mb/s (rel err %.2e, tol 1e-3)", sim, want, err));
}

void ac2() {
  SweepSpec spec = make_figure_config(Figure::fig5);
  const Curve c(run_sweep(spec, {.jobs = jobs(), .dump_cycles = {}}));
  const double d40 = c.t(40, 0.0) - c.t(40, 0.5);
  const double d10 = c.t(10, 0.0) - c.t(10, 0.5);
  report("AC2", d40 >= 3.0 && d40 <= 20.0 && d10 < d40,
         fmt("drop w=0->0.5: agg40 %.3f Mb/s (want [3,20]), agg10 %.3f Mb/s (want < agg40); %zu seeds",
             d40, d10, spec.seeds.size()));
}

void ac3() {
  SweepSpec spec = make_figure_config(Figure::fig6);
  const Curve c(run_sweep(spec, {.jobs = jobs(), .dump_cycles = {}}));
  bool monotone = true, saturated = true;
  std::string where;
  for (std::size_t agg : spec.agg_rates) {
    for (std::size_t i = 1; i < spec.values.size(); ++i) {
      const double prev = c.t(agg, spec.values[i - 1]), cur = c.t(agg, spec.values[i]);
      if (cur > prev * 1.01) {
        monotone = false;
        where += fmt(" rise agg%zu C=%g;", agg, spec.values[i]);
      }
      if (spec.values[i - 1] >= static_cast<double>(agg) && std::abs(cur / prev - 1.0) >= 0.02) {
        saturated = false;
        where += fmt(" unsaturated agg%zu C=%g;", agg, spec.values[i]);
      }
    }
  }
  const double cmax = spec.values.back();
  const double d40 = c.t(40, 0.0) - c.t(40, cmax);
  const double d10 = c.t(10, 0.0) - c.t(10, cmax);
  report("AC3", monotone && saturated && d40 > d10,
         fmt("non-increasing in C (1%%): %s; saturation C>=agg (<2%%): %s; drop C=0->%g agg40 %.3f > agg10 %.3f Mb/s%s",
             monotone ? "yes" : "no", saturated ? "yes" : "no", cmax, d40, d10, where.c_str()));
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

void ac4() {
  SweepSpec spec = make_figure_config(Figure::fig7);
  const Curve c(run_sweep(spec, {.jobs = jobs(), .dump_cycles = {}}));
  const auto& vs = spec.values;

  // (a) agg 10 flat, never idles
  double lo = 1e18, hi = 0, max_delay = 0;
  for (double v : vs) {
    lo = std::min(lo, c.t(10, v));
    hi = std::max(hi, c.t(10, v));
    max_delay = std::max(max_delay, c.d(10, v));
  }
  const double spread = (hi - lo) / hi;
  report("AC4a", spread < 0.03 && max_delay == 0.0,
         fmt("agg10 throughput spread %.2f%% (want < 3%%), max delay fraction %.3g (want 0)", spread * 100, max_delay));

  // (b) transition = first ratio with delay fraction > 0
  auto transition = [&](std::size_t agg) -> double {
    for (double v : vs)
      if (c.d(agg, v) > 0.0) return v;
    return INFINITY;
  };
  const double t20 = transition(20), t40 = transition(40);
  report("AC4b", t40 < t20, fmt("transition ratio agg40 %g < agg20 %g", t40, t20));

  // (c) curves meet at the largest ratio
  const double vmax = vs.back();
  const double gap = std::abs(c.t(20, vmax) - c.t(40, vmax)) / std::max(c.t(20, vmax), c.t(40, vmax));
  report("AC4c", gap < 0.10,
         fmt("ratio %g: agg20 %.2f vs agg40 %.2f Mb/s, differ %.2f%% (want < 10%%)", vmax, c.t(20, vmax),
             c.t(40, vmax), gap * 100));

  // (d) drop at ratio 27 below the flat (pre-transition) level
  double flat = 0;
  int nflat = 0;
  for (double v : vs)
    if (v < t40) flat += c.t(40, v), ++nflat;
  flat /= std::max(nflat, 1);
  const double drop27 = flat - c.t(40, 27.0);
  report("AC4d", nflat > 0 && drop27 >= 20.0 && drop27 <= 60.0,
         fmt("agg40 flat %.2f Mb/s, at ratio 27 %.2f Mb/s, drop %.2f (want [20,60])", flat, c.t(40, 27.0), drop27));

  // (e) linear decline after each transition
  bool ok = true;
  std::string detail;
  for (std::size_t agg : {std::size_t{20}, std::size_t{40}}) {
    const double tr = transition(agg);
    std::vector<double> x, y;
    for (double v : vs)
      if (v >= tr) x.push_back(v), y.push_back(c.t(agg, v));
    const double r2 = x.size() >= 3 ? r_squared(x, y) : 0.0;
    ok = ok && x.size() >= 3 && r2 >= 0.9;
    detail += fmt("agg%zu R^2 %.4f over %zu points; ", agg, r2, x.size());
  }
  report("AC4e", ok, detail + "want R^2 >= 0.9");
}

void ac5() {
  bool conserve = true, cap = true, frac = true, closure = true;
  for (double ratio : {0.0, 1.0, 4.0, 14.0, 27.0}) {
    for (std::size_t agg : {10u, 40u}) {
      SweepSpec spec = make_figure_config(Figure::fig7);
      spec.base.horizon = 4.0;
      spec.base.warmup = 0.4;
      const SimConfig cfg = configure_point(spec, {ratio, agg, 5});
      const SimResult r = run(cfg);
      conserve = conserve && r.totals.delivered_bits <= r.totals.generated_bits;
      cap = cap && r.metrics.aggregate_throughput < 4 * 54e6;
      frac = frac && r.metrics.delay_fraction >= 0.0 && r.metrics.delay_fraction <= 1.0;
      // whole run: every instant up to the last cycle end is a gap or a cycle
      double durations = 0, delays = 0, longest = 0;
      for (const auto& c : r.cycles) {
        durations += c.duration();
        delays += c.delay;
        longest = std::max(longest, c.duration());
      }
      const double end = r.cycles.empty() ? 0.0 : r.cycles.back().tx_end;
      closure = closure && std::abs(end - (durations + delays)) <= longest + 1e-9;
      const Window w = r.window;
      const double tail = r.cycles.empty() ? w.length() : std::max(0.0, w.end - r.cycles.back().tx_end);
      const double acc = busy_time(r.cycles, w) + delay_fraction(r.cycles, w) * w.length() + tail;
      closure = closure && std::abs(acc - w.length()) <= longest + 1e-9;
    }
  }
  std::mt19937 gen(2024);
  std::uniform_int_distribution<std::uint32_t> dist(0, 65535);
  bool aligned = true;
  for (int i = 0; i < 10000; ++i) {
    const std::uint32_t p = dist(gen);
    const auto len = subframe_len(p);
    aligned = aligned && len % 4 == 0 && len >= p + 72 && len <= p + 75;
  }
  SweepSpec spec = make_figure_config(Figure::fig7);
  spec.values = {0, 6, 27};
  spec.seeds = {1, 2};
  spec.base.horizon = 3.0;
  spec.base.warmup = 0.3;
  std::ostringstream a, b;
  write_results_csv(a, run_sweep(spec, {.jobs = 1, .dump_cycles = {}}));
  write_results_csv(b, run_sweep(spec, {.jobs = jobs(), .dump_cycles = {}}));
  const bool det = a.str() == b.str();
  report("AC5", conserve && cap && frac && closure && aligned && det,
         fmt("conservation %d, throughput < M x 54 Mb/s %d, delay fraction in [0,1] %d, time closure %d, "
             "10^4 subframes 4-aligned %d, byte-identical CSV %d",
             conserve, cap, frac, closure, aligned, det));
}

void ac6() {
  // FIFO selection versus every M-subset.
  std::mt19937_64 gen(99);
  bool sel_ok = true;
  int trials = 0;
  for (; trials < 1000; ++trials) {
    const std::size_t n = 1 + gen() % 12;
    const std::size_t thr = 1 + gen() % 4;
    std::vector<std::deque<Packet>> qs(n);
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t len = gen() % 6;
      for (std::size_t k = 0; k < len; ++k) qs[u].push_back({u, static_cast<double>(gen() % 8) + k, 512});
    }
    std::vector<std::size_t> ready;
    for (std::size_t u = 0; u < n; ++u)
      if (!qs[u].empty() && qs[u].size() >= thr) ready.push_back(u);
    std::optional<std::set<std::size_t>> want;
    if (ready.size() >= 4) {
      auto key = [&](std::size_t u) { return std::make_pair(qs[u].front().arrival_time, u); };
      for (std::uint32_t mask = 0; mask < (1u << ready.size()); ++mask) {
        if (__builtin_popcount(mask) != 4) continue;
        bool ok = true;
        for (std::size_t i = 0; i < ready.size() && ok; ++i)
          for (std::size_t j = 0; j < ready.size() && ok; ++j)
            if ((mask >> i & 1) && !(mask >> j & 1) && key(ready[j]) < key(ready[i])) ok = false;
        if (ok) {
          std::set<std::size_t> s;
          for (std::size_t i = 0; i < ready.size(); ++i)
            if (mask >> i & 1) s.insert(ready[i]);
          want = s;
        }
      }
    }
    const auto got = select_users_fifo(qs, 4, thr);
    if (got.has_value() != want.has_value() ||
        (got && std::set<std::size_t>(got->begin(), got->end()) != *want))
      sel_ok = false;
  }

  // Size moments, 10^6 samples per weight, 3 standard errors.
  bool mom_ok = true;
  double worst = 0;
  for (double w : {0.0, 0.1, 0.25, 0.4, 0.5}) {
    PacketSizeModel m;
    m.kind = SizeKind::three_point;
    m.extreme_weight = w;
    PacketSizeSampler s(m);
    Rng rng(7 + static_cast<std::uint64_t>(w * 1000));
    const int n = 1'000'000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double x = s.sample(rng) / 1024.0;
      sum += x;
      sq += (x - 0.5) * (x - 0.5);
    }
    const double se_mean = std::sqrt(w / 2 / n), se_var = std::sqrt((0.125 * w - w * w / 4) / n);
    // zero standard error: the estimate must be exact
    auto z = [](double got, double want, double se) {
      if (se > 0) return std::abs(got - want) / se;
      return std::abs(got - want) < 1e-12 ? 0.0 : INFINITY;
    };
    const double zm = z(sum / n, 0.5, se_mean), zv = z(sq / n, w / 2, se_var);
    worst = std::max({worst, zm, zv});
    mom_ok = mom_ok && zm <= 3 && zv <= 3;
  }

  // ON/OFF long-run rate, 100 s x 10^3 seeds at ratio 27.
  double bits = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    TrafficSource src;
    src.mode = SourceMode::on_off;
    src.mean_on = 10e-3;
    src.mean_off = 260e-3;
    src.peak_rate = 54e6;
    src.seed = static_cast<std::uint64_t>(s);
    ArrivalStream stream(src);
    while (auto p = stream.next()) {
      if (p->arrival_time >= 100.0) break;
      bits += msdu_len(p->payload) * 8.0;
    }
  }
  const double rate_err = std::abs(bits / (100.0 * seeds) / (54e6 / 27) - 1.0);
  report("AC6", sel_ok && mom_ok && rate_err < 0.05,
         fmt("select vs brute force on %d states %s; size moments worst |z| %.2f (want <= 3); "
             "ON/OFF rate rel err %.3f%% (want < 5%%)",
             trials, sel_ok ? "agree" : "DISAGREE", worst, rate_err * 100));
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  ac4();
  ac5();
  ac6();
  std::printf("%s: %d criterion line(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
