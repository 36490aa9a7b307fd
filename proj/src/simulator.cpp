#include "parisian/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "parisian/errors.hpp"

namespace parisian {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Steps of the bridge scheme keep every boundary at least this many standard
// deviations of the step away, or fall back to dt.
constexpr double kBridgeSafety = 5.0;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Points of a Brownian path already visited by one discretization.
struct BrownianTrack {
  std::vector<double> t, b;
};

// Brownian motion queried at increasing times. Free mode draws plain increments.
// Record mode also stores every point; replay mode walks through a recorded
// track and fills the gaps with Brownian bridges, so a second discretization
// sees exactly the same path.
class Brownian {
 public:
  enum class Mode { Free, Record, Replay };

  Brownian(Rng& rng, Mode mode = Mode::Free, BrownianTrack* track = nullptr)
      : rng_(rng), mode_(mode), track_(track) {}

  // B(t1) - B(t) for the previous query time t.
  double increment(double t1) {
    if (!(t1 > now_)) return 0.0;
    const double before = value_;
    if (mode_ == Mode::Replay) {
      const auto& tr = *track_;
      while (next_ < tr.t.size() && tr.t[next_] < t1) {
        now_ = tr.t[next_];
        value_ = tr.b[next_];
        ++next_;
      }
      if (next_ < tr.t.size() && tr.t[next_] == t1) {
        value_ = tr.b[next_++];
      } else if (next_ < tr.t.size()) {
        const double t2 = tr.t[next_], b2 = tr.b[next_];
        const double w = (t1 - now_) / (t2 - now_);
        value_ += w * (b2 - value_) + std::sqrt((t1 - now_) * (t2 - t1) / (t2 - now_)) * normal_(rng_);
      } else {
        value_ += std::sqrt(t1 - now_) * normal_(rng_);
      }
    } else {
      value_ += std::sqrt(t1 - now_) * normal_(rng_);
      if (mode_ == Mode::Record) {
        track_->t.push_back(t1);
        track_->b.push_back(value_);
      }
    }
    now_ = t1;
    return value_ - before;
  }

 private:
  Rng& rng_;
  Mode mode_;
  BrownianTrack* track_;
  double now_ = 0.0, value_ = 0.0;
  std::size_t next_ = 0;
  boost::random::normal_distribution<double> normal_;
};

// Random streams of one path. Claims, the killing time and the Parisian clocks
// each have their own generator, so two discretizations of a path share them.
struct PathNoise {
  Rng jumps, clocks, extremes;

  explicit PathNoise(std::uint64_t base)
      : jumps(splitmix64(base + 1)), clocks(splitmix64(base + 2)), extremes(splitmix64(base + 3)) {}
};

std::uint64_t path_base(std::uint64_t seed, std::size_t i) { return splitmix64(seed ^ splitmix64(i + 1)); }

enum class FreeEnd { Top, DrawDown, Censored };
enum class EpisodeEnd { Recovered, Ruined, Censored };

class Walker {
 public:
  Walker(const ModelParams& m, const DrawdownSpec* dd, double q, const SimConfig& sim, PathNoise& noise,
         Brownian& bm)
      : m_(m), dd_(dd), q_(q), sim_(sim), noise_(noise), bm_(bm), exact_(m.sigma == 0.0) {}

  double t = 0.0, u = 0.0, max = 0.0, injected = 0.0, injected_disc = 0.0;
  double kill_time = kInf;
  double killed_position = std::numeric_limits<double>::quiet_NaN();
  double drawdown_level = 0.0;
  double drawdown_overshoot = 0.0;
  // Shortfall below the level inside the step that revealed a diffusive draw-down.
  double pending = 0.0;

  void start(double x) {
    t = 0.0;
    u = max = x;
    next_jump_ = t + exponential(noise_.jumps, m_.a);
  }

  static double exponential(Rng& g, double rate) {
    if (!(rate > 0.0)) return kInf;
    return boost::random::exponential_distribution<double>(rate)(g);
  }
  double clock(double rate) { return exponential(noise_.clocks, rate); }

  // Free evolution until the top, a draw-down (level and overshoot stored, nothing injected yet) or the horizon.
  FreeEnd free_phase(double top) { return exact_ ? free_exact(top) : free_diffusive(top); }

  // Reflected evolution at `level` until the path regains `record` or the clock expires.
  EpisodeEnd episode(double level, double record, double clock_end) {
    return exact_ ? episode_exact(level, record, clock_end) : episode_diffusive(level, record, clock_end);
  }

  void inject(double amount) {
    injected += amount;
    injected_disc += std::exp(-q_ * t) * amount;
  }

  // Records the position when a step ends exactly at the killing time.
  void note_kill_at_step_end() {
    if (t == kill_time && std::isnan(killed_position)) killed_position = u;
  }

 private:
  const ModelParams& m_;
  const DrawdownSpec* dd_;
  double q_;
  const SimConfig& sim_;
  PathNoise& noise_;
  Brownian& bm_;
  bool exact_;
  double next_jump_ = kInf;
  boost::random::uniform_01<double> uniform_;

  double level_of(double m) const { return dd_->level(m); }

  void jump() {
    u -= exponential(noise_.jumps, m_.c);
    next_jump_ = t + exponential(noise_.jumps, m_.a);
  }

  // Records the position at the Exp(q) killing time if it falls in (t, t_end].
  template <class Pos>
  void note_kill(double t_end, Pos pos) {
    if (kill_time > t && kill_time <= t_end && std::isnan(killed_position)) killed_position = pos(kill_time);
  }

  FreeEnd free_exact(double top) {
    for (;;) {
      const double t_top = std::isfinite(top) ? t + (top - u) / m_.mu : kInf;
      const double t_end = std::min({next_jump_, t_top, sim_.horizon});
      const double u0 = u, t0 = t;
      note_kill(t_end, [&](double s) { return u0 + m_.mu * (s - t0); });
      if (t_top <= next_jump_ && t_top <= sim_.horizon) {
        t = t_top;
        u = max = top;
        return FreeEnd::Top;
      }
      if (sim_.horizon < next_jump_) {
        u += m_.mu * (sim_.horizon - t);
        max = std::max(max, u);
        t = sim_.horizon;
        return FreeEnd::Censored;
      }
      u += m_.mu * (next_jump_ - t);
      max = std::max(max, u);
      t = next_jump_;
      jump();
      const double lvl = level_of(max);
      if (u < lvl) {
        drawdown_level = lvl;
        drawdown_overshoot = lvl - u;
        return FreeEnd::DrawDown;
      }
    }
  }

  EpisodeEnd episode_exact(double level, double record, double clock_end) {
    for (;;) {
      const double t_rec = t + (record - u) / m_.mu;
      const double t_end = std::min({next_jump_, t_rec, clock_end, sim_.horizon});
      const double u0 = u, t0 = t;
      note_kill(t_end, [&](double s) { return u0 + m_.mu * (s - t0); });
      if (t_rec <= next_jump_ && t_rec <= clock_end && t_rec <= sim_.horizon) {
        t = t_rec;
        u = record;
        return EpisodeEnd::Recovered;
      }
      if (clock_end <= next_jump_ && clock_end <= sim_.horizon) {
        u += m_.mu * (clock_end - t);
        t = clock_end;
        return EpisodeEnd::Ruined;
      }
      if (sim_.horizon < next_jump_) {
        u += m_.mu * (sim_.horizon - t);
        t = sim_.horizon;
        return EpisodeEnd::Censored;
      }
      u += m_.mu * (next_jump_ - t);
      t = next_jump_;
      jump();
      if (u < level) {
        inject(level - u);
        u = level;
      }
    }
  }

  double step_size(double distance) const {
    if (sim_.scheme == SimConfig::Scheme::Euler) return sim_.dt;
    const double d = distance / (kBridgeSafety * m_.sigma);
    return std::clamp(d * d, sim_.dt, std::max(sim_.dt, sim_.max_step));
  }

  // Endpoint of a Brownian step with drift, plus extremes of the bridge between the endpoints.
  struct Step {
    double end, hi, lo;
  };

  // Step from t to te.
  Step diffuse(double te) {
    const double h = te - t;
    const double sd = m_.sigma * std::sqrt(h);
    const double end = u + m_.mu * h + m_.sigma * bm_.increment(te);
    if (sim_.scheme == SimConfig::Scheme::Euler) return {end, std::max(u, end), std::min(u, end)};
    const double d = end - u;
    const double var2 = 2.0 * sd * sd;
    const double hi = 0.5 * (u + end + std::sqrt(d * d - var2 * std::log(1.0 - uniform_(noise_.extremes))));
    const double lo = 0.5 * (u + end - std::sqrt(d * d - var2 * std::log(1.0 - uniform_(noise_.extremes))));
    return {end, hi, lo};
  }

  double step_end(double h, double extra) const {
    double te = std::min({t + h, next_jump_, sim_.horizon, extra});
    if (kill_time > t) te = std::min(te, kill_time);
    return te;
  }

  FreeEnd free_diffusive(double top) {
    for (;;) {
      if (t >= sim_.horizon) return FreeEnd::Censored;
      const double lvl = level_of(max);
      const double te = step_end(step_size(std::min(u - lvl, top - u)), kInf);
      const Step s = diffuse(te);
      t = te;
      if (s.hi >= top) {
        u = max = top;
        return FreeEnd::Top;
      }
      max = std::max(max, s.hi);
      const double new_lvl = level_of(max);
      u = s.end;
      if (s.lo < lvl || s.end < new_lvl) {
        // A diffusive draw-down creeps onto the level; what the step spends below it is injected.
        const bool before_new_max = s.lo < lvl;
        drawdown_level = before_new_max ? lvl : new_lvl;
        drawdown_overshoot = 0.0;
        pending = drawdown_level - (before_new_max ? s.lo : s.end);
        return FreeEnd::DrawDown;
      }
      note_kill_at_step_end();
      if (t == next_jump_) {
        jump();
        const double l = level_of(max);
        if (u < l) {
          drawdown_level = l;
          drawdown_overshoot = l - u;
          pending = 0.0;
          return FreeEnd::DrawDown;
        }
      }
    }
  }

  EpisodeEnd episode_diffusive(double level, double record, double clock_end) {
    for (;;) {
      if (t >= sim_.horizon) return EpisodeEnd::Censored;
      const double te = step_end(step_size(std::min(u - level, record - u)), clock_end);
      const Step s = diffuse(te);
      t = te;
      if (s.hi >= record) {
        u = s.end;
        max = std::max(record, s.hi);
        note_kill_at_step_end();
        return EpisodeEnd::Recovered;
      }
      u = s.end;
      if (s.lo < level) {
        inject(level - s.lo);
        u += level - s.lo;
      }
      note_kill_at_step_end();
      if (t == clock_end) return EpisodeEnd::Ruined;
      if (t == next_jump_) {
        jump();
        if (u < level) {
          inject(level - u);
          u = level;
        }
      }
    }
  }
};

}  // namespace

void SimConfig::validate() const {
  if (n_paths < 1) throw InvalidArgument("n_paths must be >= 1");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be > 0");
  if (!(max_step > 0.0)) throw InvalidArgument("max_step must be > 0");
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
}

namespace {

void check_start(const DrawdownSpec& drawdown, double x, double b) {
  if (!(x <= b)) throw DomainError("start point above the barrier b");
  if (!(x >= drawdown.domain_min())) throw DomainViolation("start point below the draw-down domain");
}

PathOutcome run_path(const ModelParams& model, const DrawdownSpec& drawdown, const TransformSpec& transform,
                     double x, double b, const SimConfig& sim, PathNoise& noise, Brownian& bm) {
  const double top = std::isfinite(b) ? b : sim.escape_level;

  Walker w(model, &drawdown, transform.q, sim, noise, bm);
  w.kill_time = w.clock(transform.q);
  w.start(x);

  PathOutcome out;
  auto finish = [&](PathKind kind) {
    out.kind = kind;
    out.event_time = w.t;
    out.position = w.u;
    out.running_max = std::max(w.max, w.u);
    out.total_injection = w.injected;
    out.discounted_injection = w.injected_disc;
    out.discount_factor = std::exp(-transform.q * w.t);
    if (kind == PathKind::HorizonCensored) out.killed_position = std::numeric_limits<double>::quiet_NaN();
    else out.killed_position = w.killed_position;
    return out;
  };

  if (x >= top) return finish(std::isfinite(b) ? PathKind::UpcrossedB : PathKind::Escaped);

  for (;;) {
    const FreeEnd fe = w.free_phase(top);
    if (fe == FreeEnd::Top) return finish(std::isfinite(b) ? PathKind::UpcrossedB : PathKind::Escaped);
    if (fe == FreeEnd::Censored) return finish(PathKind::HorizonCensored);

    const double level = w.drawdown_level;
    const double record = w.max;
    if (out.episodes == 0) {
      out.first_drawdown_time = w.t;
      out.first_overshoot = w.drawdown_overshoot;
    }
    ++out.episodes;
    if (w.drawdown_overshoot > 0.0) {
      w.inject(w.drawdown_overshoot);
      w.u = level;
    } else if (w.pending > 0.0) {
      w.inject(w.pending);
      w.u += w.pending;
    }
    w.pending = 0.0;
    w.note_kill_at_step_end();

    const double clock_end = w.t + w.clock(transform.lambda);
    const EpisodeEnd ee = w.episode(level, record, clock_end);
    if (ee == EpisodeEnd::Ruined) return finish(PathKind::ParisianRuin);
    if (ee == EpisodeEnd::Censored) return finish(PathKind::HorizonCensored);
  }
}

// Runs work(begin, end) over [0, n) on up to `workers` threads.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F work) {
  const std::size_t n_workers = std::min<std::size_t>(workers, n);
  if (n_workers <= 1) {
    work(0, n);
    return;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (n + n_workers - 1) / n_workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
    if (begin < end) threads.emplace_back(work, begin, end);
  }
  for (auto& th : threads) th.join();
}

}  // namespace

PathOutcome simulate_path(const ModelParams& model, const DrawdownSpec& drawdown, const TransformSpec& transform,
                          double x, double b, const SimConfig& sim, Rng& rng) {
  check_start(drawdown, x, b);
  PathNoise noise(rng());
  Brownian bm(rng);
  return run_path(model, drawdown, transform, x, b, sim, noise, bm);
}

std::vector<PathOutcome> simulate_paths(const ModelParams& model, const DrawdownSpec& drawdown,
                                        const TransformSpec& transform, double x, double b, const SimConfig& sim) {
  model.validate();
  transform.validate();
  sim.validate();
  check_start(drawdown, x, b);
  std::vector<PathOutcome> out(sim.n_paths);
  parallel_for(sim.n_paths, sim.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t base = path_base(sim.seed, i);
      PathNoise noise(base);
      Rng diffusion(splitmix64(base + 4));
      Brownian bm(diffusion);
      out[i] = run_path(model, drawdown, transform, x, b, sim, noise, bm);
    }
  });
  return out;
}

CoupledPaths simulate_coupled_paths(const ModelParams& model, const DrawdownSpec& drawdown,
                                    const TransformSpec& transform, double x, double b, const SimConfig& sim) {
  model.validate();
  transform.validate();
  sim.validate();
  check_start(drawdown, x, b);
  SimConfig fine_sim = sim;
  fine_sim.dt = sim.dt / 2.0;
  CoupledPaths out;
  out.coarse.resize(sim.n_paths);
  out.fine.resize(sim.n_paths);
  parallel_for(sim.n_paths, sim.workers, [&](std::size_t begin, std::size_t end) {
    BrownianTrack track;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t base = path_base(sim.seed, i);
      track.t.clear();
      track.b.clear();
      {
        PathNoise noise(base);
        Rng diffusion(splitmix64(base + 4));
        Brownian bm(diffusion, Brownian::Mode::Record, &track);
        out.coarse[i] = run_path(model, drawdown, transform, x, b, sim, noise, bm);
      }
      // Same claims and clocks; the extremes of each step stay private to the scheme.
      PathNoise noise(base);
      noise.extremes.seed(splitmix64(base + 5));
      Rng bridge(splitmix64(base + 6));
      Brownian bm(bridge, Brownian::Mode::Replay, &track);
      out.fine[i] = run_path(model, drawdown, transform, x, b, fine_sim, noise, bm);
    }
  });
  return out;
}

double path_value(const PathOutcome& o, Functional f, const TransformSpec& tr, double escape_value) {
  const bool up = o.kind == PathKind::UpcrossedB;
  const bool ruin = o.kind == PathKind::ParisianRuin;
  switch (f) {
    case Functional::UpcrossLaplace:
      return up ? o.discount_factor : 0.0;
    case Functional::RuinLaplace:
      return ruin ? o.discount_factor : 0.0;
    case Functional::UXi:
      return up || ruin ? o.discount_factor : 0.0;
    case Functional::RuinProb:
      return ruin ? 1.0 : (o.kind == PathKind::Escaped ? escape_value : 0.0);
    case Functional::JointG:
      return up || ruin ? std::exp(-tr.q * o.event_time + tr.u * o.position - tr.v * o.total_injection) : 0.0;
    case Functional::VXi:
      return o.discounted_injection + (o.kind == PathKind::Escaped ? o.discount_factor * escape_value : 0.0);
    case Functional::DrawdownLaplace:
      return std::isfinite(o.first_drawdown_time) ? std::exp(-tr.q * o.first_drawdown_time) : 0.0;
    case Functional::Overshoot:
      return std::isfinite(o.first_drawdown_time) ? std::exp(-tr.q * o.first_drawdown_time) * o.first_overshoot
                                                  : 0.0;
  }
  return 0.0;
}

namespace {

// Mean and standard error of value(i) over i < n; censored(i) marks paths cut by the horizon.
template <class F, class C>
Estimate reduce(std::size_t n, F value, C censored) {
  Estimate e;
  e.n = n;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (censored(i)) ++e.censored;
    const double v = value(i);
    const double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  e.mean = mean;
  e.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  e.censoring_excess = static_cast<double>(e.censored) > 0.01 * static_cast<double>(e.n);
  return e;
}

template <class F>
Estimate reduce(const std::vector<PathOutcome>& paths, F value) {
  return reduce(
      paths.size(), [&](std::size_t i) { return value(paths[i]); },
      [&](std::size_t i) { return paths[i].kind == PathKind::HorizonCensored; });
}

}  // namespace

Estimate summarize(const std::vector<PathOutcome>& paths, Functional f, const TransformSpec& transform,
                   double escape_value) {
  return reduce(paths, [&](const PathOutcome& p) { return path_value(p, f, transform, escape_value); });
}

Estimate summarize_shift(const CoupledPaths& paths, Functional f, const TransformSpec& transform,
                         double escape_value) {
  if (paths.coarse.size() != paths.fine.size()) throw InvalidArgument("coupled path sets differ in size");
  return reduce(
      paths.coarse.size(),
      [&](std::size_t i) {
        return path_value(paths.fine[i], f, transform, escape_value) -
               path_value(paths.coarse[i], f, transform, escape_value);
      },
      [&](std::size_t i) {
        return paths.coarse[i].kind == PathKind::HorizonCensored || paths.fine[i].kind == PathKind::HorizonCensored;
      });
}

Estimate estimate(const ModelParams& model, const DrawdownSpec& drawdown, const TransformSpec& transform, double x,
                  double b, const SimConfig& sim, Functional f, double escape_value) {
  return summarize(simulate_paths(model, drawdown, transform, x, b, sim), f, transform, escape_value);
}

std::vector<Estimate> killed_position_histogram(const std::vector<PathOutcome>& paths,
                                                const std::vector<double>& edges) {
  std::vector<Estimate> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    out.push_back(reduce(paths, [&](const PathOutcome& p) {
      return p.killed_position >= lo && p.killed_position < hi ? 1.0 : 0.0;
    }));
  }
  return out;
}

Estimate estimate_episode_transform(const ModelParams& model, const TransformSpec& transform, double z,
                                    const SimConfig& sim) {
  model.validate();
  transform.validate();
  sim.validate();
  if (!(z > 0.0)) throw DomainError("episode transform needs z > 0");
  std::vector<PathOutcome> paths(sim.n_paths);
  for (std::size_t i = 0; i < sim.n_paths; ++i) {
    const std::uint64_t base = path_base(sim.seed, i);
    PathNoise noise(base);
    Rng diffusion(splitmix64(base + 4));
    Brownian bm(diffusion);
    Walker w(model, nullptr, 0.0, sim, noise, bm);
    w.start(0.0);
    w.max = z;
    const double clock_end = w.clock(transform.lambda);
    const EpisodeEnd ee = w.episode(0.0, z, clock_end);
    auto& p = paths[i];
    p.kind = ee == EpisodeEnd::Ruined ? PathKind::ParisianRuin
                                      : (ee == EpisodeEnd::Censored ? PathKind::HorizonCensored : PathKind::UpcrossedB);
    p.event_time = w.t;
    p.position = w.u;
    p.total_injection = w.injected;
  }
  return reduce(paths, [&](const PathOutcome& p) {
    if (p.kind != PathKind::ParisianRuin) return 0.0;
    return std::exp(-transform.q * p.event_time + transform.u * p.position - transform.v * p.total_injection);
  });
}

}  // namespace parisian
