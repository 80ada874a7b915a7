#include "fls/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

namespace fls::sim {

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::Deploy: return "deploy";
    case EventKind::ArriveAtPoint: return "arrive_at_point";
    case EventKind::BatteryThresholdReached: return "battery_threshold_reached";
    case EventKind::ArriveAtCharger: return "arrive_at_charger";
    case EventKind::ChargeComplete: return "charge_complete";
    case EventKind::HeartbeatTick: return "heartbeat_tick";
    case EventKind::FailureInjected: return "failure_injected";
    case EventKind::StandbySubstitute: return "standby_substitute";
    case EventKind::ReplacementArrived: return "replacement_arrived";
    case EventKind::GcPickup: return "gc_pickup";
    case EventKind::TerminusRecover: return "terminus_recover";
    case EventKind::StandbyReturn: return "standby_return";
    case EventKind::Count: break;
  }
  return "unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

FailureStream::FailureStream(std::uint64_t seed, FlsId id)
    : rng_(splitmix64(seed ^ splitmix64(0x5eed0000ULL + id))) {}

Millis FailureStream::next_interval(double mttf_hours) {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  const double x = -mttf_hours * static_cast<double>(kMillisPerHour) * std::log1p(-u);
  return std::max<Millis>(1, std::llround(x));
}

detect::FailureKind FailureStream::next_kind() {
  static constexpr detect::FailureKind kinds[4] = {
      detect::FailureKind::Rotor, detect::FailureKind::LightSource, detect::FailureKind::Compute,
      detect::FailureKind::Battery};
  return kinds[rng_() >> 62];
}

std::vector<FailureRecord> inject_failures(std::uint64_t seed, std::span<const FlsId> population,
                                           double mttf_hours, Millis horizon_ms) {
  std::vector<FailureRecord> out;
  if (!std::isfinite(mttf_hours) || mttf_hours <= 0.0) return out;
  for (FlsId id : population) {
    FailureStream stream(seed, id);
    Millis t = 0;
    for (;;) {
      t += stream.next_interval(mttf_hours);
      if (t > horizon_ms) break;
      out.push_back({t, id, stream.next_kind()});
    }
  }
  std::sort(out.begin(), out.end(), [](const FailureRecord& a, const FailureRecord& b) {
    return std::tie(a.time_ms, a.fls) < std::tie(b.time_ms, b.fls);
  });
  return out;
}

OnsetReport degraded_onset_detector(std::span<const DarkInterval> intervals, Millis tolerance_ms) {
  OnsetReport r;
  for (const auto& iv : intervals) {
    if (iv.end_ms - iv.start_ms > tolerance_ms) r.onset_times_ms.push_back(iv.start_ms + tolerance_ms);
  }
  std::sort(r.onset_times_ms.begin(), r.onset_times_ms.end());
  for (std::size_t i = 1; i < r.onset_times_ms.size(); ++i)
    r.inter_onset_ms.push_back(r.onset_times_ms[i] - r.onset_times_ms[i - 1]);
  return r;
}

namespace {

constexpr int kNone = -1;
constexpr std::uint32_t kLaunch = std::numeric_limits<std::uint32_t>::max();

enum class PostKind { Point, Standby };

enum Cat : std::size_t { kIllum, kStandby, kTransit, kCharging, kHangar, kFailed, kFirst, kCatCount };

Cat category(Role r) {
  switch (r) {
    case Role::Illuminating: return kIllum;
    case Role::Standby: return kStandby;
    case Role::InTransitToCharger:
    case Role::InTransitToDisplay: return kTransit;
    case Role::Charging: return kCharging;
    case Role::Hangar: return kHangar;
    case Role::Failed: return kFailed;
    case Role::FirstDeployment: return kFirst;
  }
  return kHangar;
}

struct Post {
  PostKind kind = PostKind::Point;
  Vec3 pos;
  std::uint32_t flock_id = 0;  // 0: not part of any flock
  std::uint32_t slot = 0;
  Millis period_ms = 0;          // common swap period of the post's flock
  Millis next_departure_ms = 0;  // next departure on the post's stagger grid
  int station = 0;
  int dispatcher = 0;
  Millis travel_ms = 0;  // to the home station
  int group = kNone;
  int member = kNone;
  int occupant = kNone;
  int inbound = kNone;
  std::uint32_t launch_epoch = 0;
  bool request_pending = false;
  Millis planned_departure = 0;
  // Display points only.
  bool dark = false;
  bool awaiting_detection = false;
  bool missing = false;
  int covering = kNone;
  Millis uncovered_since = -1;
  Millis vacated_at = -1;
  Millis failed_at = -1;
};

struct Agent {
  explicit Agent(FlsId i, std::uint64_t seed) : id(i), stream(seed, i) {}

  FlsId id;
  Role role = Role::Hangar;
  bool first_deployment = false;
  int home = kNone;  // post this FLS is assigned to
  int at = kNone;    // post it currently serves or flies to
  int station = kNone;
  int reserved_for = kNone;  // standby only: point it covers
  int moving_to = kNone;
  Millis battery = 0;
  Millis battery_t = 0;
  bool draining = false;
  std::uint32_t stint = 0;
  std::uint32_t timer = 0;
  std::uint32_t move = 0;
  Vec3 pos;
  FailureStream stream;
};

struct Station {
  Vec3 pos;
  std::uint32_t slots = 1;
  std::uint32_t busy = 0;
  std::deque<int> queue;
  std::deque<int> hangar;
};

struct Group {
  std::vector<int> members;  // point posts
  int standby_post = kNone;
  std::vector<reliability::Blob> truth;
  std::optional<reliability::GroupPayloads> payloads;
};

struct PendingFailure {
  FlsId fls = 0;
  int point = kNone;
  int standby_post = kNone;
  bool detected = false;
};

struct ActiveDetector {
  detect::FailureDetector detector;
  int failure = 0;
  bool done = false;
};

reliability::Blob payload_for(const DisplayPoint& p, std::size_t index) {
  std::ostringstream os;
  os << "path:" << p.l << ',' << p.h << ',' << p.d << ";rgb:" << int(p.r) << ',' << int(p.g) << ','
     << int(p.b) << ";a:" << p.a << ";idx:" << index;
  const std::string s = os.str();
  return {s.begin(), s.end()};
}

}  // namespace

struct Simulation::Impl {
  SimConfig cfg;
  stag::FlockingPlan point_plan;
  stag::FlockingPlan standby_plan;
  std::vector<Post> posts;
  std::size_t n_points = 0;
  std::vector<Agent> agents;
  std::vector<Station> stations;
  std::vector<Vec3> dispatchers;
  std::vector<Group> groups;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, int> cell_index;
  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> queue;
  std::uint64_t seq = 0;
  Millis now = 0;
  std::array<std::uint32_t, kCatCount> counts{};
  std::deque<int> pending;
  std::vector<PendingFailure> failures;
  std::vector<ActiveDetector> detectors;
  SimMetrics m;
  double speed = 1.0;
  double mttf_hours = 0.0;
  bool groups_on = false;
  SwapPolicy policy = SwapPolicy::Predispatch;
  std::optional<Census> last_census;
  bool finished = false;

  explicit Impl(SimConfig c);

  // -- setup -------------------------------------------------------------
  void validate();
  void build_posts();
  void build_agents();

  // -- helpers -----------------------------------------------------------
  Millis travel(const Vec3& a, const Vec3& b) const {
    return std::llround(reliability::distance(a, b) / speed * 1000.0);
  }
  void push(EventKind kind, Millis t, std::uint32_t subject, std::uint32_t target,
            std::uint32_t epoch = 0) {
    queue.push(SimEvent{std::max(t, now), seq++, kind, subject, target, epoch});
  }
  Millis battery_at(const Agent& a) const {
    return a.draining ? a.battery - (now - a.battery_t) : a.battery;
  }
  void set_battery(Agent& a, Millis value, bool draining) {
    a.battery = std::clamp<Millis>(value, 0, cfg.battery.beta_ms);
    a.battery_t = now;
    a.draining = draining;
  }
  void set_role(Agent& a, Role r) {
    --counts[category(a.role)];
    ++counts[category(r)];
    a.role = r;
  }
  bool predispatches(const Post& p) const {
    return p.kind == PostKind::Standby || policy == SwapPolicy::Predispatch;
  }

  // -- mechanics ---------------------------------------------------------
  Millis schedule_threshold(Agent& a);
  void start_stint(Agent& a);
  void predispatch(Post& p, Millis departure);
  int choose_station(const Post& p) const;
  void launch_from(int station, int post);
  void request(int post);
  void serve_pending();
  void refresh(int post);
  void point_vacated(int post, bool failure);
  bool try_cover(int post, bool move_now);
  void start_cover_move(Agent& c, int post);
  void release_standby(Agent& c);
  void offer_standby(int group);
  void depart(Agent& a);
  void send_to_charger(Agent& a, int station, Millis arrive_at);
  void start_charge(Agent& a, int station);
  std::vector<FlsId> neighbor_ids(int post) const;
  void on_detected(int failure);

  // -- event handlers ----------------------------------------------------
  void handle(const SimEvent& e);
  void on_deploy(const SimEvent& e);
  void on_arrive(Agent& a, int post);
  void on_threshold(Agent& a, std::uint32_t epoch);
  void on_arrive_charger(Agent& a, int station);
  void on_charge_complete(Agent& a, int station);
  void on_failure(Agent& a, std::uint32_t epoch);
  void on_tick(int detector);
  void on_standby_arrive(Agent& c, int post, std::uint32_t epoch);
  void on_standby_return(Agent& c, std::uint32_t epoch);

  void end_batch();
  void run_until(Millis t);
};

Simulation::Impl::Impl(SimConfig c) : cfg(std::move(c)) {
  validate();
  m.seed = cfg.seed;
  m.horizon_ms = cfg.horizon_ms;
  build_posts();
  build_agents();
}

void Simulation::Impl::validate() {
  cfg.cloud = validate_cloud(std::move(cfg.cloud));
  cfg.battery.validate();
  cfg.detector.validate();
  if (cfg.horizon_ms < 0) throw FlsError(ErrorCode::Range, "horizon must be >= 0");
  if (cfg.fls_speed && !(*cfg.fls_speed > 0.0)) throw FlsError(ErrorCode::Range, "fls_speed must be > 0");
  if (cfg.onset_tolerance_ms < 0) throw FlsError(ErrorCode::Range, "onset tolerance must be >= 0");
  if (cfg.gc_delay_ms < 0 || cfg.recovery_delay_ms < 0)
    throw FlsError(ErrorCode::Range, "GC and recovery delays must be >= 0");
  if (cfg.dispatcher_rate < 0.0) throw FlsError(ErrorCode::Range, "dispatcher rate must be >= 0");
  if (cfg.reliability) cfg.reliability->validate();
  groups_on = cfg.reliability.has_value();
  if (cfg.failure_injection) {
    if (cfg.mttf_hours) {
      mttf_hours = *cfg.mttf_hours;
    } else if (cfg.reliability) {
      mttf_hours = cfg.reliability->mttf_hours;
    } else {
      throw FlsError(ErrorCode::Config, "failure injection needs an MTTF");
    }
    if (!(mttf_hours > 0.0)) throw FlsError(ErrorCode::Range, "mttf must be positive");
    if (std::isinf(mttf_hours)) mttf_hours = 0.0;
  }
  policy = cfg.swap_policy;
  if (policy == SwapPolicy::Auto) policy = groups_on ? SwapPolicy::StandbyFirst : SwapPolicy::Predispatch;
  if (policy == SwapPolicy::StandbyFirst && !groups_on) policy = SwapPolicy::Predispatch;
}

void Simulation::Impl::build_posts() {
  const auto& pts = cfg.cloud.points;
  n_points = pts.size();
  point_plan = stag::plan_flocks(n_points, cfg.battery, cfg.s_threshold_ms);

  // Default infrastructure sits just below the display.
  Vec3 below{0.0, -2.0, 0.0};
  if (!pts.empty()) {
    std::int64_t lo[3] = {pts[0].l, pts[0].h, pts[0].d};
    std::int64_t hi[3] = {pts[0].l, pts[0].h, pts[0].d};
    for (const auto& p : pts) {
      const std::int64_t v[3] = {p.l, p.h, p.d};
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    }
    below = {(lo[0] + hi[0]) / 2.0, static_cast<double>(lo[1]) - 2.0, (lo[2] + hi[2]) / 2.0};
  }
  auto charger_pos = cfg.charger_positions.empty() ? std::vector<Vec3>{below} : cfg.charger_positions;
  dispatchers = cfg.dispatcher_positions.empty() ? std::vector<Vec3>{below} : cfg.dispatcher_positions;
  for (const auto& p : charger_pos) {
    Station st;
    st.pos = p;
    stations.push_back(std::move(st));
  }

  // Groups order the posts so that group members take consecutive stag slots.
  std::vector<std::size_t> order;
  order.reserve(n_points);
  std::vector<reliability::ReliabilityGroup> formed;
  if (groups_on) {
    formed = reliability::form_groups(cfg.cloud, cfg.reliability->group_size);
    for (const auto& g : formed)
      for (auto i : g.members) order.push_back(i);
  } else {
    for (std::size_t i = 0; i < n_points; ++i) order.push_back(i);
  }

  posts.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    posts[i].kind = PostKind::Point;
    posts[i].pos = reliability::position_of(pts[i]);
    cell_index[{pts[i].l, pts[i].h, pts[i].d}] = static_cast<int>(i);
  }
  const std::uint64_t full = std::max<std::uint64_t>(point_plan.full_flock_size, 1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    Post& p = posts[order[k]];
    const auto& flock = point_plan.flocks[k / full];
    p.flock_id = flock.flock_id;
    p.slot = static_cast<std::uint32_t>(k % full + 1);
  }

  const auto point_flocks = static_cast<std::uint32_t>(point_plan.h());
  if (groups_on) {
    if (cfg.standby_depletes)
      standby_plan = stag::plan_flocks(formed.size(), cfg.battery, cfg.s_threshold_ms);
    const std::uint64_t sfull = std::max<std::uint64_t>(standby_plan.full_flock_size, 1);
    for (std::size_t gi = 0; gi < formed.size(); ++gi) {
      Group g;
      for (std::size_t mi = 0; mi < formed[gi].members.size(); ++mi) {
        const auto idx = formed[gi].members[mi];
        g.members.push_back(static_cast<int>(idx));
        posts[idx].group = static_cast<int>(gi);
        posts[idx].member = static_cast<int>(mi);
        g.truth.push_back(payload_for(pts[idx], idx));
      }
      g.payloads.emplace(cfg.scheme, g.truth);
      Post sp;
      sp.kind = PostKind::Standby;
      sp.pos = formed[gi].standby_position;
      sp.group = static_cast<int>(gi);
      if (cfg.standby_depletes) {
        const auto& flock = standby_plan.flocks[gi / sfull];
        sp.flock_id = point_flocks + flock.flock_id;
        sp.slot = static_cast<std::uint32_t>(gi % sfull + 1);
      }
      g.standby_post = static_cast<int>(posts.size());
      posts.push_back(sp);
      groups.push_back(std::move(g));
    }
  }

  auto nearest = [](const std::vector<Vec3>& sites, const Vec3& p) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sites.size(); ++s) {
      const double d = reliability::distance(sites[s], p);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(s);
      }
    }
    return std::pair{best, bd};
  };
  double max_dist = 0.0;
  for (auto& p : posts) {
    auto [s, d] = nearest(charger_pos, p.pos);
    p.station = s;
    p.dispatcher = nearest(dispatchers, p.pos).first;
    max_dist = std::max(max_dist, d);
  }
  const double threshold_s = static_cast<double>(cfg.s_threshold_ms) / kMillisPerSecond;
  if (cfg.fls_speed) {
    speed = *cfg.fls_speed;
    if (max_dist / speed >= threshold_s) {
      m.warnings.push_back("farthest display-to-charger flight (" + std::to_string(max_dist / speed) +
                           " s) is not below S_threshold");
    }
  } else {
    speed = max_dist > 0.0 ? max_dist / (threshold_s / 4.0) : 1.0;
  }
  for (auto& p : posts) p.travel_ms = travel(p.pos, stations[p.station].pos);

  m.flocks = static_cast<std::uint32_t>(point_plan.h() + standby_plan.h());
  m.transit_bound = 2 * m.flocks;
}

void Simulation::Impl::build_agents() {
  const Millis beta = cfg.battery.beta_ms;
  const Millis omega = cfg.battery.omega_ms;

  // Every member of a flock cycles with one period, beta minus the round trip
  // of its farthest member, so the stagger never drifts. Zero travel gives
  // STAG's S_i * alpha_i = beta.
  std::map<std::uint32_t, Millis> flock_tmax;
  std::map<std::uint32_t, std::uint64_t> flock_size;
  for (const auto& p : posts) {
    if (p.flock_id == 0) continue;
    flock_tmax[p.flock_id] = std::max(flock_tmax[p.flock_id], p.travel_ms);
    ++flock_size[p.flock_id];
  }
  for (auto& p : posts) {
    if (p.flock_id == 0) continue;
    p.period_ms = beta - 2 * flock_tmax[p.flock_id];
    if (p.period_ms <= 0) {
      throw FlsError(ErrorCode::Infeasible,
                     "battery flight time cannot cover the round trip to the charging station");
    }
  }

  // Hangar inventory per (flock, station): every FLS launched within one
  // charge-plus-round-trip window of a swap is still away. Zero travel gives
  // ceil(omega * alpha_i / beta).
  std::map<std::pair<std::uint32_t, int>, std::uint64_t> shares;
  for (const auto& p : posts)
    if (p.flock_id != 0) ++shares[{p.flock_id, p.station}];
  std::vector<std::uint64_t> reserve(stations.size(), 0);
  for (const auto& [key, n] : shares) {
    const Millis tmax = flock_tmax[key.first];
    const Millis cycle = beta - 2 * tmax;
    const auto num = static_cast<unsigned __int128>(n) * static_cast<std::uint64_t>(omega + 2 * tmax);
    reserve[key.second] += static_cast<std::uint64_t>((num + cycle - 1) / cycle);
  }

  unsigned __int128 slot_total = 0;
  for (std::size_t s = 0; s < stations.size(); ++s) {
    stations[s].slots = cfg.charger_slots > 0
                            ? cfg.charger_slots
                            : static_cast<std::uint32_t>(std::max<std::uint64_t>(reserve[s], 1));
    slot_total += stations[s].slots;
  }
  // Swap rate sum(alpha_i / beta) against charge throughput slots / omega.
  unsigned __int128 demand = 0;
  for (const auto& p : posts)
    if (p.flock_id != 0) demand += static_cast<std::uint64_t>(omega);
  if (demand > slot_total * static_cast<std::uint64_t>(beta)) {
    throw FlsError(ErrorCode::Infeasible,
                   "charger capacity cannot sustain the STAG swap rate; need at least " +
                       std::to_string(static_cast<std::uint64_t>(
                           (demand + static_cast<std::uint64_t>(beta) - 1) / static_cast<std::uint64_t>(beta))) +
                       " charging slots");
  }

  std::vector<std::uint64_t> spares(stations.size(), 0);
  if (mttf_hours > 0.0 && !posts.empty()) {
    std::uint64_t total_spares = 0;
    if (cfg.spare_fls) {
      total_spares = *cfg.spare_fls;
    } else {
      Millis tmax = 0;
      for (const auto& p : posts) tmax = std::max(tmax, p.travel_ms);
      const double window = static_cast<double>(cfg.gc_delay_ms + cfg.recovery_delay_ms + omega +
                                                2 * tmax + cfg.detector.detection_bound_ms());
      const double mean = static_cast<double>(posts.size()) * window /
                          (mttf_hours * static_cast<double>(kMillisPerHour));
      total_spares = static_cast<std::uint64_t>(std::ceil(mean + 3.0 * std::sqrt(mean))) + 1;
    }
    for (std::uint64_t k = 0; k < total_spares; ++k) ++spares[k % stations.size()];
  }

  auto make = [&](Role role, Millis battery) -> Agent& {
    agents.emplace_back(static_cast<FlsId>(agents.size()), cfg.seed);
    Agent& a = agents.back();
    a.role = role;
    a.battery = battery;
    ++counts[category(role)];
    return a;
  };

  std::vector<std::uint64_t> launched(dispatchers.size(), 0);
  std::vector<std::pair<Millis, int>> first;  // (launch time, agent)
  for (std::size_t pi = 0; pi < posts.size(); ++pi) {
    Agent& a = make(Role::FirstDeployment, beta);
    a.at = static_cast<int>(pi);
    a.pos = dispatchers[posts[pi].dispatcher];
    const auto k = launched[posts[pi].dispatcher]++;
    const Millis t = cfg.dispatcher_rate > 0.0
                         ? static_cast<Millis>(std::floor(static_cast<double>(k) * 1000.0 / cfg.dispatcher_rate))
                         : 0;
    first.emplace_back(t, static_cast<int>(a.id));
  }
  // Bootstrap: slot j of a flock leaves j stagger intervals after the whole
  // flock is in place.
  std::map<std::uint32_t, Millis> flock_start;
  for (const auto& [t, id] : first) {
    const Post& p = posts[agents[id].at];
    if (p.flock_id == 0) continue;
    const Millis arrive = t + travel(agents[id].pos, p.pos);
    flock_start[p.flock_id] = std::max(flock_start[p.flock_id], arrive);
  }
  for (auto& p : posts) {
    if (p.flock_id == 0) continue;
    const stag::Interval spacing{p.period_ms, static_cast<std::int64_t>(flock_size[p.flock_id])};
    p.next_departure_ms = flock_start[p.flock_id] + spacing.at(p.slot);
  }
  for (std::size_t s = 0; s < stations.size(); ++s) {
    for (std::uint64_t k = 0; k < reserve[s] + spares[s]; ++k) {
      Agent& a = make(Role::Hangar, beta);
      a.station = static_cast<int>(s);
      a.pos = stations[s].pos;
      stations[s].hangar.push_back(static_cast<int>(a.id));
    }
  }
  m.pool_size = agents.size();

  if (cfg.horizon_ms == 0) return;
  for (const auto& [t, id] : first) push(EventKind::Deploy, t, static_cast<std::uint32_t>(id), agents[id].at);
}

Millis Simulation::Impl::schedule_threshold(Agent& a) {
  ++a.timer;
  if (!a.draining || a.at == kNone) return std::numeric_limits<Millis>::max();
  const Post& here = posts[a.at];
  Millis t = now + battery_at(a) - here.travel_ms;
  if (a.home == a.at && here.flock_id != 0) {
    // Replacements, including those for failed FLSs, rejoin the post's grid
    // at the first slot a successor can still reach in time.
    Post& post = posts[a.at];
    const Millis earliest = now + std::max<Millis>(post.travel_ms, 1);
    if (post.next_departure_ms < earliest)
      post.next_departure_ms += ((earliest - post.next_departure_ms - 1) / post.period_ms + 1) * post.period_ms;
    t = std::min(t, post.next_departure_ms);
  }
  t = std::max(t, now);
  push(EventKind::BatteryThresholdReached, t, a.id, 0, a.timer);
  return t;
}

void Simulation::Impl::start_stint(Agent& a) {
  ++a.stint;
  if (mttf_hours > 0.0)
    push(EventKind::FailureInjected, now + a.stream.next_interval(mttf_hours), a.id, 0, a.stint);
}

void Simulation::Impl::predispatch(Post& p, Millis departure) {
  p.planned_departure = departure;
  const auto idx = static_cast<std::uint32_t>(&p - posts.data());
  push(EventKind::Deploy, departure - p.travel_ms, kLaunch, idx, ++p.launch_epoch);
}

int Simulation::Impl::choose_station(const Post& p) const {
  if (!stations[p.station].hangar.empty()) return p.station;
  int best = kNone;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < stations.size(); ++s) {
    if (stations[s].hangar.empty()) continue;
    const double d = reliability::distance(stations[s].pos, p.pos);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(s);
    }
  }
  return best;
}

void Simulation::Impl::launch_from(int station, int post) {
  Station& st = stations[station];
  Post& p = posts[post];
  Agent& a = agents[st.hangar.front()];
  st.hangar.pop_front();
  set_role(a, Role::InTransitToDisplay);
  set_battery(a, cfg.battery.beta_ms, true);
  a.at = post;
  a.home = kNone;
  a.station = station;
  a.pos = st.pos;
  const bool incumbent = p.occupant != kNone && agents[p.occupant].home == post;
  const Millis target = incumbent ? p.planned_departure : now;
  const Millis arrival = std::max(now + travel(st.pos, p.pos), target);
  if (incumbent && arrival > target) ++m.totals.late_replacements;
  p.inbound = static_cast<int>(a.id);
  p.request_pending = false;
  ++m.totals.deploys;
  push(EventKind::ReplacementArrived, arrival, a.id, static_cast<std::uint32_t>(post));
}

void Simulation::Impl::request(int post) {
  Post& p = posts[post];
  if (p.inbound != kNone || p.request_pending) return;
  p.request_pending = true;
  const int s = choose_station(p);
  if (s == kNone) {
    pending.push_back(post);
    return;
  }
  launch_from(s, post);
}

void Simulation::Impl::serve_pending() {
  while (!pending.empty()) {
    const int post = pending.front();
    Post& p = posts[post];
    if (!p.request_pending || p.inbound != kNone) {
      pending.pop_front();
      continue;
    }
    const int s = choose_station(p);
    if (s == kNone) break;
    pending.pop_front();
    launch_from(s, post);
  }
}

void Simulation::Impl::refresh(int post) {
  Post& p = posts[post];
  if (p.kind != PostKind::Point) return;
  const bool uncovered = p.dark && p.covering == kNone;
  if (uncovered && p.uncovered_since < 0) {
    p.uncovered_since = now;
  } else if (!uncovered && p.uncovered_since >= 0) {
    if (now > p.uncovered_since)
      m.dark_intervals.push_back({static_cast<std::uint32_t>(post), p.uncovered_since, now});
    p.uncovered_since = -1;
  }
}

void Simulation::Impl::point_vacated(int post, bool failure) {
  Post& p = posts[post];
  p.dark = true;
  if (groups_on) try_cover(post, !failure);
  refresh(post);
  if (!failure) request(post);
}

bool Simulation::Impl::try_cover(int post, bool move_now) {
  Post& p = posts[post];
  if (p.covering != kNone || p.group == kNone) return false;
  const Group& g = groups[p.group];
  const Post& sp = posts[g.standby_post];
  if (sp.occupant == kNone) return false;
  Agent& c = agents[sp.occupant];
  if (c.reserved_for != kNone || c.role != Role::Standby) return false;
  if (cfg.scheme == Scheme::Parity) {
    for (int mpost : g.members)
      if (mpost != post && posts[mpost].missing) return false;
  }
  c.reserved_for = post;
  p.covering = static_cast<int>(c.id);
  if (move_now) start_cover_move(c, post);
  return true;
}

void Simulation::Impl::start_cover_move(Agent& c, int post) {
  set_battery(c, battery_at(c), true);
  ++c.move;
  c.moving_to = post;
  if (c.home != kNone) ++posts[c.home].launch_epoch;  // a covering standby is not swapped in place
  schedule_threshold(c);
  push(EventKind::StandbySubstitute, now + travel(c.pos, posts[post].pos), c.id,
       static_cast<std::uint32_t>(post), c.move);
}

void Simulation::Impl::release_standby(Agent& c) {
  const int covered = c.reserved_for;
  if (covered != kNone) {
    posts[covered].covering = kNone;
    refresh(covered);
  }
  c.reserved_for = kNone;
  c.moving_to = kNone;
  ++c.move;
  if (c.at != kNone && posts[c.at].occupant == static_cast<int>(c.id) && c.at != c.home)
    posts[c.at].occupant = kNone;
  if (c.home == kNone) {
    // Its standby post was handed to a fresh FLS while it was covering.
    depart(c);
    return;
  }
  set_role(c, Role::Standby);
  set_battery(c, battery_at(c), true);
  c.at = c.home;
  const Post& h = posts[c.home];
  push(EventKind::StandbyReturn, now + travel(c.pos, h.pos), c.id, static_cast<std::uint32_t>(c.home), c.move);
  const Millis t = schedule_threshold(c);
  Post& home = posts[c.home];
  if (home.inbound == kNone && !home.request_pending && t != std::numeric_limits<Millis>::max())
    predispatch(home, t);
  offer_standby(home.group);
}

void Simulation::Impl::offer_standby(int group) {
  if (group == kNone) return;
  for (int post : groups[group].members) {
    const Post& p = posts[post];
    if (p.dark && p.covering == kNone && !p.awaiting_detection) {
      if (try_cover(post, true)) refresh(post);
      return;
    }
  }
}

void Simulation::Impl::send_to_charger(Agent& a, int station, Millis arrive_at) {
  a.station = station;
  push(EventKind::ArriveAtCharger, arrive_at, a.id, static_cast<std::uint32_t>(station));
}

void Simulation::Impl::depart(Agent& a) {
  const int here = a.at;
  Post& q = posts[here];
  set_battery(a, battery_at(a), true);
  const bool regular = a.home == here;
  const int home = a.home;
  ++a.stint;
  ++a.timer;
  ++a.move;
  const int reserved = a.reserved_for;
  a.reserved_for = kNone;
  a.moving_to = kNone;
  set_role(a, Role::InTransitToCharger);
  a.at = kNone;
  a.home = kNone;
  a.first_deployment = false;
  send_to_charger(a, q.station, now + q.travel_ms);

  if (reserved != kNone && reserved != here) {
    posts[reserved].covering = kNone;
    refresh(reserved);
  }
  if (q.kind == PostKind::Point) {
    if (regular) {
      q.occupant = kNone;
      ++m.totals.swaps;
      m.swaps.push_back({now, q.flock_id, static_cast<std::uint32_t>(here)});
      q.vacated_at = now;
      point_vacated(here, false);
    } else {
      if (q.occupant == static_cast<int>(a.id)) {
        q.occupant = kNone;
        q.covering = kNone;
        q.dark = true;
        refresh(here);
      }
      if (home != kNone) {
        posts[home].occupant = kNone;
        request(home);
      }
    }
  } else {
    q.occupant = kNone;
    request(here);
  }
}

void Simulation::Impl::start_charge(Agent& a, int station) {
  Station& st = stations[station];
  ++st.busy;
  ++m.totals.charges;
  push(EventKind::ChargeComplete, now + stag::charge_time(cfg.battery.beta_ms - a.battery, cfg.battery),
       a.id, static_cast<std::uint32_t>(station));
}

std::vector<FlsId> Simulation::Impl::neighbor_ids(int post) const {
  std::vector<FlsId> out;
  const Post& p = posts[post];
  auto live = [&](int q) { return posts[q].occupant != kNone; };
  if (p.kind == PostKind::Standby) {
    for (int q : groups[p.group].members)
      if (live(q)) out.push_back(static_cast<FlsId>(posts[q].occupant));
    return out;
  }
  const auto& pt = cfg.cloud.points[post];
  static constexpr int off[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (const auto& o : off) {
    auto it = cell_index.find({pt.l + o[0], pt.h + o[1], pt.d + o[2]});
    if (it != cell_index.end() && live(it->second)) out.push_back(static_cast<FlsId>(posts[it->second].occupant));
  }
  if (!out.empty()) return out;
  std::vector<std::pair<double, int>> near;
  for (std::size_t q = 0; q < n_points; ++q) {
    if (static_cast<int>(q) == post || !live(static_cast<int>(q))) continue;
    near.emplace_back(reliability::distance(p.pos, posts[q].pos), static_cast<int>(q));
  }
  const std::size_t k = std::min<std::size_t>(6, near.size());
  std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end());
  for (std::size_t i = 0; i < k; ++i) out.push_back(static_cast<FlsId>(posts[near[i].second].occupant));
  return out;
}

void Simulation::Impl::on_detected(int failure) {
  PendingFailure& f = failures[failure];
  if (f.detected) return;
  f.detected = true;
  ++m.totals.detections;
  if (f.point != kNone) {
    Post& p = posts[f.point];
    p.awaiting_detection = false;
    if (p.covering != kNone) {
      Agent& c = agents[p.covering];
      if (c.at != f.point && c.moving_to != f.point) start_cover_move(c, f.point);
    } else if (groups_on && p.dark) {
      if (try_cover(f.point, true)) refresh(f.point);
    }
    request(f.point);
  }
  if (f.standby_post != kNone) request(f.standby_post);
}

void Simulation::Impl::handle(const SimEvent& e) {
  ++m.totals.events;
  ++m.event_counts[static_cast<std::size_t>(e.kind)];
  switch (e.kind) {
    case EventKind::Deploy:
      on_deploy(e);
      break;
    case EventKind::ArriveAtPoint:
    case EventKind::ReplacementArrived:
      on_arrive(agents[e.subject], static_cast<int>(e.target));
      break;
    case EventKind::BatteryThresholdReached:
      on_threshold(agents[e.subject], e.epoch);
      break;
    case EventKind::ArriveAtCharger:
      on_arrive_charger(agents[e.subject], static_cast<int>(e.target));
      break;
    case EventKind::ChargeComplete:
      on_charge_complete(agents[e.subject], static_cast<int>(e.target));
      break;
    case EventKind::HeartbeatTick:
      on_tick(static_cast<int>(e.subject));
      break;
    case EventKind::FailureInjected:
      on_failure(agents[e.subject], e.epoch);
      break;
    case EventKind::StandbySubstitute:
      on_standby_arrive(agents[e.subject], static_cast<int>(e.target), e.epoch);
      break;
    case EventKind::StandbyReturn:
      on_standby_return(agents[e.subject], e.epoch);
      break;
    case EventKind::GcPickup:
      break;
    case EventKind::TerminusRecover: {
      Agent& a = agents[e.subject];
      set_battery(a, 0, false);
      a.pos = stations[a.station].pos;
      on_arrive_charger(a, a.station);
      break;
    }
    case EventKind::Count:
      break;
  }
}

void Simulation::Impl::on_deploy(const SimEvent& e) {
  if (e.subject == kLaunch) {
    Post& p = posts[e.target];
    if (e.epoch != p.launch_epoch) return;
    request(static_cast<int>(e.target));
    return;
  }
  Agent& a = agents[e.subject];
  Post& p = posts[e.target];
  set_battery(a, cfg.battery.beta_ms, true);
  p.inbound = static_cast<int>(a.id);
  ++m.totals.deploys;
  push(EventKind::ArriveAtPoint, now + travel(a.pos, p.pos), a.id, e.target);
}

void Simulation::Impl::on_arrive(Agent& a, int post) {
  Post& p = posts[post];
  if (p.inbound == static_cast<int>(a.id)) p.inbound = kNone;
  set_battery(a, battery_at(a), true);
  a.pos = p.pos;
  const bool first = a.role == Role::FirstDeployment;

  if (p.kind == PostKind::Point) {
    const int displaced = p.occupant;
    const int covering = p.covering;
    if (displaced != kNone && agents[displaced].home == post) depart(agents[displaced]);
    p.occupant = static_cast<int>(a.id);
    set_role(a, Role::Illuminating);
    a.home = a.at = post;
    if (p.vacated_at >= 0) {
      m.swap_gap_samples_ms.push_back(now - p.vacated_at);
      p.vacated_at = -1;
    }
    if (p.failed_at >= 0) {
      m.repair_time_samples_ms.push_back(now - p.failed_at);
      p.failed_at = -1;
    }
    p.missing = false;
    p.awaiting_detection = false;
    p.dark = false;
    if (covering != kNone) release_standby(agents[covering]);
    refresh(post);
  } else {
    if (p.occupant != kNone && p.occupant != static_cast<int>(a.id)) {
      Agent& old = agents[p.occupant];
      old.home = kNone;
      if (old.at == post) {
        old.at = post;
        depart(old);
      }
    }
    p.occupant = static_cast<int>(a.id);
    set_role(a, Role::Standby);
    a.home = a.at = post;
    a.reserved_for = kNone;
    a.moving_to = kNone;
    set_battery(a, battery_at(a), cfg.standby_depletes);
  }

  a.first_deployment = first;
  start_stint(a);
  const Millis t = schedule_threshold(a);
  if (predispatches(p) && a.draining) predispatch(p, t);
  if (p.kind == PostKind::Standby) offer_standby(p.group);
}

void Simulation::Impl::on_threshold(Agent& a, std::uint32_t epoch) {
  if (epoch != a.timer) return;
  if (a.role != Role::Illuminating && a.role != Role::Standby) return;
  if (a.at == kNone) return;
  if (a.role == Role::Standby && a.moving_to != kNone) {
    // Battery ran out on the way to cover a point; the point loses its cover.
    a.at = a.home;
  }
  depart(a);
}

void Simulation::Impl::on_arrive_charger(Agent& a, int station) {
  set_battery(a, battery_at(a), false);
  set_role(a, Role::Charging);
  a.pos = stations[station].pos;
  Station& st = stations[station];
  if (st.busy < st.slots) {
    start_charge(a, station);
  } else {
    st.queue.push_back(static_cast<int>(a.id));
  }
}

void Simulation::Impl::on_charge_complete(Agent& a, int station) {
  Station& st = stations[station];
  --st.busy;
  set_battery(a, cfg.battery.beta_ms, false);
  set_role(a, Role::Hangar);
  a.station = station;
  st.hangar.push_back(static_cast<int>(a.id));
  if (!st.queue.empty()) {
    const int next = st.queue.front();
    st.queue.pop_front();
    start_charge(agents[next], station);
  }
  serve_pending();
}

void Simulation::Impl::on_failure(Agent& a, std::uint32_t epoch) {
  if (epoch != a.stint) return;
  if (a.role != Role::Illuminating && a.role != Role::Standby) return;
  const detect::FailureKind kind = a.stream.next_kind();
  m.failures.push_back({now, a.id, kind});
  ++m.totals.failures;

  int here = a.moving_to != kNone ? a.home : a.at;
  if (here == kNone) here = a.home;
  Post& q = posts[here];
  const std::vector<FlsId> neigh = neighbor_ids(here);
  FlsAgent view;
  view.id = a.id;
  view.role = a.role;
  const auto response = detect::on_self_failure(kind, view, neigh, now);

  PendingFailure pf;
  pf.fls = a.id;
  const bool regular = a.home == here;
  const int home = a.home;
  const int reserved = a.reserved_for;

  set_battery(a, battery_at(a), false);
  ++a.stint;
  ++a.timer;
  ++a.move;
  set_role(a, Role::Failed);
  a.at = kNone;
  a.home = kNone;
  a.reserved_for = kNone;
  a.moving_to = kNone;
  a.first_deployment = false;
  a.station = q.station;

  if (reserved != kNone && reserved != here) {
    posts[reserved].covering = kNone;
    refresh(reserved);
  }
  if (q.kind == PostKind::Point) {
    q.occupant = kNone;
    if (regular) {
      q.failed_at = now;
      q.missing = true;
      q.awaiting_detection = true;
      ++q.launch_epoch;
      pf.point = here;
      point_vacated(here, true);
    } else {
      q.covering = kNone;
      q.dark = true;
      refresh(here);
      if (home != kNone) {
        posts[home].occupant = kNone;
        ++posts[home].launch_epoch;
        pf.standby_post = home;
      }
    }
  } else {
    q.occupant = kNone;
    ++q.launch_epoch;
    pf.standby_post = here;
  }

  const int fidx = static_cast<int>(failures.size());
  failures.push_back(pf);
  push(EventKind::GcPickup, now + cfg.gc_delay_ms, a.id, 0);
  push(EventKind::TerminusRecover, now + cfg.gc_delay_ms + cfg.recovery_delay_ms, a.id, 0);

  if (response.directive != detect::Directive::None) {
    for (const auto& msg : response.messages)
      if (msg.kind == detect::MessageKind::FailureNotice) ++m.totals.failure_notices;
    on_detected(fidx);
    return;
  }
  // Silent failure: every neighbour (or the Hub when isolated) runs the
  // heartbeat/poll protocol against the failed FLS.
  const Millis period = cfg.detector.heartbeat_period_ms;
  const Millis last_hb = (now / period) * period;
  std::vector<FlsId> owners = neigh;
  if (owners.empty()) owners.push_back(detect::kOrchestrator);
  for (FlsId owner : owners) {
    detect::FailureDetector det(owner, cfg.detector, last_hb);
    det.add_neighbor(a.id, last_hb);
    detectors.push_back({std::move(det), fidx, false});
    push(EventKind::HeartbeatTick, detectors.back().detector.next_deadline(),
         static_cast<std::uint32_t>(detectors.size() - 1), 0);
  }
}

void Simulation::Impl::on_tick(int idx) {
  ActiveDetector& d = detectors[idx];
  if (d.done) return;
  const FlsId failed = failures[d.failure].fls;
  for (const auto& msg : d.detector.on_tick(now)) {
    if (msg.kind != detect::MessageKind::FailureNotice) continue;
    ++m.totals.failure_notices;
    if (msg.to == detect::kOrchestrator) on_detected(d.failure);
  }
  const auto* entry = d.detector.neighbor(failed);
  if (entry == nullptr || entry->status == detect::Status::DeclaredFailed) {
    d.done = true;
    return;
  }
  push(EventKind::HeartbeatTick, std::max(d.detector.next_deadline(), now + 1), static_cast<std::uint32_t>(idx), 0);
}

void Simulation::Impl::on_standby_arrive(Agent& c, int post, std::uint32_t epoch) {
  if (epoch != c.move) return;
  Post& p = posts[post];
  if (p.covering != static_cast<int>(c.id)) return;
  set_battery(c, battery_at(c), true);
  c.pos = p.pos;
  c.moving_to = kNone;

  if (p.failed_at >= 0 && p.group != kNone) {
    const Group& g = groups[p.group];
    std::vector<reliability::Blob> surviving;
    std::vector<std::size_t> missing;
    for (std::size_t mi = 0; mi < g.members.size(); ++mi) {
      const int mp = g.members[mi];
      if (posts[mp].missing) missing.push_back(mi);
      if (mp != post) surviving.push_back(g.truth[mi]);
    }
    try {
      const auto blob = g.payloads->recover(static_cast<std::size_t>(p.member), surviving, missing);
      if (cfg.scheme == Scheme::Parity) ++m.totals.reconstructions;
      if (blob != g.truth[static_cast<std::size_t>(p.member)]) ++m.totals.reconstruction_mismatches;
    } catch (const FlsError& err) {
      if (err.code() != ErrorCode::MultiFailure) throw;
      ++m.totals.multi_failure_waits;
      release_standby(c);
      return;
    }
  }

  p.occupant = static_cast<int>(c.id);
  c.at = post;
  set_role(c, Role::Illuminating);
  ++m.totals.standby_substitutions;
  p.dark = false;
  refresh(post);
  schedule_threshold(c);
}

void Simulation::Impl::on_standby_return(Agent& c, std::uint32_t epoch) {
  if (epoch != c.move || c.home == kNone) return;
  Post& h = posts[c.home];
  c.pos = h.pos;
  set_battery(c, battery_at(c), cfg.standby_depletes);
  const Millis t = schedule_threshold(c);
  if (h.inbound == kNone && !h.request_pending && t != std::numeric_limits<Millis>::max())
    predispatch(h, t);
}

void Simulation::Impl::end_batch() {
  Census c;
  c.illuminating = counts[kIllum];
  c.standby = counts[kStandby];
  c.transit = counts[kTransit];
  c.charging = counts[kCharging];
  c.hangar = counts[kHangar];
  c.failed = counts[kFailed];
  c.first_deployment = counts[kFirst];
  ++m.conservation_checks;
  bool ok = c.total() == m.pool_size && c.illuminating <= n_points;
  if (ok && agents.size() <= 5000) {
    std::array<std::uint32_t, kCatCount> recount{};
    for (const auto& a : agents) ++recount[category(a.role)];
    ok = recount == counts;
  }
  if (!ok) ++m.conservation_failures;
  m.max_transit = std::max(m.max_transit, c.transit);
  if (cfg.record_census && (!last_census || *last_census != c)) m.census.push_back({now, c});
  last_census = c;
}

void Simulation::Impl::run_until(Millis t) {
  const Millis limit = std::min(t, cfg.horizon_ms);
  while (!queue.empty() && queue.top().time_ms <= limit) {
    now = queue.top().time_ms;
    while (!queue.empty() && queue.top().time_ms == now) {
      const SimEvent e = queue.top();
      queue.pop();
      handle(e);
    }
    end_batch();
  }
  now = std::max(now, limit);
}

Simulation::Simulation(SimConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::run_until(Millis t) { impl_->run_until(t); }

SimMetrics Simulation::finish() {
  Impl& s = *impl_;
  if (!s.finished) {
    s.run_until(s.cfg.horizon_ms);
    for (std::size_t i = 0; i < s.n_points; ++i) {
      Post& p = s.posts[i];
      if (p.uncovered_since >= 0 && s.now > p.uncovered_since)
        s.m.dark_intervals.push_back({static_cast<std::uint32_t>(i), p.uncovered_since, s.now});
      p.uncovered_since = -1;
    }
    auto report = degraded_onset_detector(s.m.dark_intervals, s.cfg.onset_tolerance_ms);
    s.m.onset_times_ms = std::move(report.onset_times_ms);
    s.m.empirical_mtdi_samples_ms = std::move(report.inter_onset_ms);
    s.finished = true;
  }
  return s.m;
}

Millis Simulation::now() const { return impl_->now; }
const stag::FlockingPlan& Simulation::point_plan() const { return impl_->point_plan; }
const SimMetrics& Simulation::metrics() const { return impl_->m; }
double Simulation::fls_speed() const { return impl_->speed; }

Census Simulation::census() const {
  const auto& k = impl_->counts;
  return Census{k[kIllum], k[kStandby], k[kTransit], k[kCharging], k[kHangar], k[kFailed], k[kFirst]};
}

std::vector<Millis> Simulation::remaining_flight(std::uint32_t flock_id) const {
  const Impl& s = *impl_;
  std::vector<Millis> out;
  for (std::size_t i = 0; i < s.n_points; ++i) {
    const Post& p = s.posts[i];
    if (p.flock_id != flock_id || p.occupant == kNone) continue;
    const Agent& a = s.agents[p.occupant];
    if (a.home == static_cast<int>(i) && a.role == Role::Illuminating) out.push_back(s.battery_at(a));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FlsAgent> Simulation::agents() const {
  const Impl& s = *impl_;
  std::vector<FlsAgent> out;
  out.reserve(s.agents.size());
  for (const auto& a : s.agents) {
    FlsAgent v;
    v.id = a.id;
    v.role = a.role;
    v.remaining_flight_ms = std::clamp<Millis>(s.battery_at(a), 0, s.cfg.battery.beta_ms);
    if (a.home != kNone) {
      const Post& p = s.posts[a.home];
      if (p.flock_id != 0) {
        v.flock_id = p.flock_id;
        v.stag_id = p.slot;
      }
      if (p.group != kNone) v.group_id = static_cast<std::uint32_t>(p.group);
    }
    if (a.role == Role::Illuminating && a.at != kNone && static_cast<std::size_t>(a.at) < s.n_points)
      v.assigned_point = s.cfg.cloud.points[a.at];
    out.push_back(v);
  }
  return out;
}

SimMetrics run(const SimConfig& config) {
  Simulation sim(config);
  return sim.finish();
}

std::vector<SimMetrics> run_replications(const SimConfig& config, std::span<const std::uint64_t> seeds) {
  std::vector<std::future<SimMetrics>> jobs;
  jobs.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    SimConfig c = config;
    c.seed = seed;
    jobs.push_back(std::async(std::launch::async, [c = std::move(c)] { return run(c); }));
  }
  std::vector<SimMetrics> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  std::stable_sort(out.begin(), out.end(),
                   [](const SimMetrics& a, const SimMetrics& b) { return a.seed < b.seed; });
  return out;
}

}  // namespace fls::sim
