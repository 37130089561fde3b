#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqt/errors.hpp"
#include "aqt/network.hpp"

namespace aqt {

// Injection rate r as an exact fraction num/den with 0 < r < 1, so that the
// window bound floor(r*|I|) is computed without rounding.
class Rate {
 public:
  Rate(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num <= 0 || num >= den)
      throw ValidationError("rate " + std::to_string(num) + "/" + std::to_string(den) +
                            " must satisfy 0 < r < 1");
    const auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }

  // Accepts "p/q", a decimal literal such as "0.35", or an integer.
  static Rate parse(std::string_view text) {
    auto fail = [&] { return ValidationError("rate '" + std::string(text) + "' is not a number"); };
    auto parse_int = [&](std::string_view s) {
      std::int64_t v = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) throw fail();
      return v;
    };
    if (const auto slash = text.find('/'); slash != std::string_view::npos)
      return Rate(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rate(parse_int(text), 1);
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) throw fail();
    std::int64_t den = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    return Rate(w * den + parse_int(frac), den);
  }

  // Best rational approximation with denominator at most max_den.
  static Rate from_double(double r, std::int64_t max_den = 1'000'000) {
    if (!(r > 0.0 && r < 1.0))
      throw ValidationError("rate " + std::to_string(r) + " must satisfy 0 < r < 1");
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = r;
    for (int iter = 0; iter < 64; ++iter) {
      const auto a = static_cast<std::int64_t>(std::floor(x));
      const std::int64_t q2 = q0 + a * q1;
      if (q2 > max_den) break;
      const std::int64_t p2 = p0 + a * p1;
      p0 = p1;
      q0 = q1;
      p1 = p2;
      q1 = q2;
      const double frac = x - static_cast<double>(a);
      if (frac < 1e-12) break;
      x = 1.0 / frac;
    }
    return Rate(p1, q1);
  }

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // floor(r * length)
  std::int64_t floor_times(std::int64_t length) const { return num_ * length / den_; }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend bool operator==(const Rate&, const Rate&) = default;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 2;
};

struct InjectionEvent {
  Step time = 1;
  PacketPath path;
  friend bool operator==(const InjectionEvent&, const InjectionEvent&) = default;
};

// Interval [from, to] on `edge` that received `count` injections against a
// budget of `bound` = floor(r*(to-from+1)) + b.
struct WindowViolation {
  EdgeIndex edge = 0;
  Step from = 0;
  Step to = 0;
  std::int64_t count = 0;
  std::int64_t bound = 0;
  friend bool operator==(const WindowViolation&, const WindowViolation&) = default;
};

inline void check_burst(std::int64_t b) {
  if (b < 1) throw ValidationError("burst b=" + std::to_string(b) + " must be >= 1");
}

// Exhaustive (r,b) window check over every edge and every closed interval
// [s,t] within [1,horizon]. The reported witness is the violation with the
// earliest end step, then lowest edge index, then latest start.
inline std::optional<WindowViolation> verify_admissible(std::span<const InjectionEvent> events,
                                                        const Rate& r, std::int64_t b,
                                                        Step horizon) {
  check_burst(b);
  std::size_t edge_slots = 0;
  for (const auto& ev : events) {
    if (ev.time < 1 || ev.time > horizon)
      throw ValidationError("verify_admissible: event at step " + std::to_string(ev.time) +
                            " outside [1," + std::to_string(horizon) + "]");
    for (const EdgeIndex e : ev.path) edge_slots = std::max<std::size_t>(edge_slots, e + 1);
  }
  if (edge_slots == 0) return std::nullopt;

  // prefix[e][t] = injections on e during steps 1..t
  const auto h = static_cast<std::size_t>(horizon);
  std::vector<std::vector<std::int64_t>> prefix(edge_slots);
  std::vector<bool> touched(edge_slots, false);
  for (const auto& ev : events) {
    for (const EdgeIndex e : ev.path) {
      if (!touched[e]) {
        touched[e] = true;
        prefix[e].assign(h + 1, 0);
      }
      prefix[e][static_cast<std::size_t>(ev.time)] += 1;
    }
  }
  for (std::size_t e = 0; e < edge_slots; ++e)
    for (std::size_t t = 1; touched[e] && t <= h; ++t) prefix[e][t] += prefix[e][t - 1];

  for (std::size_t t = 1; t <= h; ++t) {
    for (std::size_t e = 0; e < edge_slots; ++e) {
      if (!touched[e]) continue;
      const auto& p = prefix[e];
      for (std::size_t s = t; s >= 1; --s) {
        const std::int64_t count = p[t] - p[s - 1];
        const std::int64_t bound = r.floor_times(static_cast<std::int64_t>(t - s + 1)) + b;
        if (count > bound)
          return WindowViolation{static_cast<EdgeIndex>(e), static_cast<Step>(s),
                                 static_cast<Step>(t), count, bound};
      }
    }
  }
  return std::nullopt;
}

// Injection source driven by the engine with strictly increasing steps
// starting at 1. Records everything it injects.
class Adversary {
 public:
  virtual ~Adversary() = default;

  std::vector<PacketPath> inject(Step t) {
    if (t <= last_step_)
      throw InvariantViolation("adversary queried out of order at step " + std::to_string(t));
    last_step_ = t;
    auto batch = produce(t);
    for (const auto& p : batch) history_.push_back({t, p});
    return batch;
  }

  // True when nothing will be injected at any step after t.
  virtual bool exhausted_after(Step t) const = 0;

  const std::vector<InjectionEvent>& history() const { return history_; }

 protected:
  virtual std::vector<PacketPath> produce(Step t) = 0;

 private:
  Step last_step_ = 0;
  std::vector<InjectionEvent> history_;
};

class InadmissibleScript : public ValidationError {
 public:
  InadmissibleScript(const WindowViolation& w, const std::string& what)
      : ValidationError(what), witness_(w) {}
  const WindowViolation& witness() const { return witness_; }

 private:
  WindowViolation witness_;
};

// Replays a fixed event list verbatim.
class ScriptedAdversary final : public Adversary {
 public:
  ScriptedAdversary(std::vector<InjectionEvent> events, const Rate& r, std::int64_t b)
      : events_(std::move(events)) {
    check_burst(b);
    Step prev = 1;
    for (const auto& ev : events_) {
      if (ev.time < 1) throw ValidationError("script: event step " + std::to_string(ev.time) + " < 1");
      if (ev.time < prev) throw ValidationError("script: events are not sorted by step");
      if (ev.path.empty()) throw ValidationError("script: event with empty path");
      prev = ev.time;
    }
    const Step horizon = events_.empty() ? 1 : events_.back().time;
    if (auto w = verify_admissible(events_, r, b, horizon)) {
      throw InadmissibleScript(
          *w, "script violates the (" + r.str() + "," + std::to_string(b) + ") window on edge #" +
                  std::to_string(w->edge) + " over [" + std::to_string(w->from) + "," +
                  std::to_string(w->to) + "]: " + std::to_string(w->count) + " > " +
                  std::to_string(w->bound));
    }
  }

  bool exhausted_after(Step t) const override {
    return events_.empty() || events_.back().time <= t;
  }

 protected:
  std::vector<PacketPath> produce(Step t) override {
    std::vector<PacketPath> out;
    while (cursor_ < events_.size() && events_[cursor_].time < t) ++cursor_;
    while (cursor_ < events_.size() && events_[cursor_].time == t) out.push_back(events_[cursor_++].path);
    return out;
  }

 private:
  std::vector<InjectionEvent> events_;
  std::size_t cursor_ = 0;
};

// All packets at step 1, nothing afterwards. No edge may carry more than b.
class BurstAdversary final : public Adversary {
 public:
  BurstAdversary(const Network& net, std::vector<PacketPath> paths, std::int64_t b)
      : paths_(std::move(paths)) {
    check_burst(b);
    std::vector<std::int64_t> load(net.edge_count(), 0);
    for (const auto& p : paths_) {
      if (!net.validate_path(p)) throw ValidationError("burst: invalid path " + net.describe(p));
      for (const EdgeIndex e : p) {
        if (++load[e] > b)
          throw ValidationError("burst: edge '" + net.edge(e).id + "' carries more than b=" +
                                std::to_string(b) + " packets");
      }
    }
  }

  bool exhausted_after(Step t) const override { return t >= 1; }

 protected:
  std::vector<PacketPath> produce(Step t) override {
    if (t == 1) return paths_;
    return {};
  }

 private:
  std::vector<PacketPath> paths_;
};

// Injects b copies of `path` at step 1, then one copy at every later step at
// which the (r,b) window constraint still holds. Never exhausts.
class SaturatingAdversary final : public Adversary {
 public:
  SaturatingAdversary(const Network& net, PacketPath path, const Rate& r, std::int64_t b)
      : path_(std::move(path)), rate_(r), burst_(b) {
    check_burst(b);
    if (!net.validate_path(path_)) throw ValidationError("saturating: invalid path " + net.describe(path_));
  }

  bool exhausted_after(Step) const override { return false; }

 protected:
  std::vector<PacketPath> produce(Step t) override {
    if (t == 1) {
      times_.assign(static_cast<std::size_t>(burst_), 1);
      return std::vector<PacketPath>(static_cast<std::size_t>(burst_), path_);
    }
    if (!admits(t)) return {};
    times_.push_back(t);
    return {path_};
  }

 private:
  // Only windows ending at t can be newly violated, and among windows with
  // the same count the shortest one binds, so it suffices to start each
  // window at t or at a recorded injection step.
  bool admits(Step t) const {
    std::int64_t count = 1;
    if (count > rate_.floor_times(1) + burst_) return false;
    for (auto it = times_.rbegin(); it != times_.rend(); ++it) {
      ++count;
      if (count > rate_.floor_times(t - *it + 1) + burst_) return false;
    }
    return true;
  }

  PacketPath path_;
  Rate rate_;
  std::int64_t burst_;
  std::vector<Step> times_;
};

// Drives an adversary through steps 1..horizon and returns what it injected.
inline std::vector<InjectionEvent> collect_events(Adversary& adv, Step horizon) {
  for (Step t = 1; t <= horizon; ++t) adv.inject(t);
  return adv.history();
}

}  // namespace aqt
