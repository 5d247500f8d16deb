/**
 * @file sim.cpp
 * @brief Synthetic biped walking on a rocking rigid surface and sensor synthesis.
 */

#include <drs/sim.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace drs {

namespace {

void require(bool cond, const std::string& field, const std::string& what)
{
    if (!cond)
        throw std::invalid_argument(field + ": " + what);
}

Mat3 rotY(double a)
{
    return so3_exp(Vec3(0.0, a, 0.0)).matrix();
}

Mat3 rotX(double a)
{
    return so3_exp(Vec3(a, 0.0, 0.0)).matrix();
}

class GaussianSampler
{
public:
    explicit GaussianSampler(const Mat3& cov)
    {
        Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (cov + cov.transpose()));
        const Vec3 sd = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        sqrt_ = es.eigenvectors() * sd.asDiagonal() * es.eigenvectors().transpose();
    }

    template <typename Rng>
    Vec3 draw(Rng& rng)
    {
        Vec3 n(normal_(rng), normal_(rng), normal_(rng));
        return sqrt_ * n;
    }

private:
    Mat3 sqrt_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

void SurfaceConfig::validate() const
{
    require(std::isfinite(pitch_amplitude) && pitch_amplitude >= 0.0 && pitch_amplitude <= 0.3,
            "surface.pitch_amplitude", "must lie in [0, 0.3] rad");
    require(std::isfinite(pitch_angular_freq) && pitch_angular_freq >= 0.0, "surface.pitch_angular_freq",
            "must be finite and >= 0");
    require(pivot.allFinite(), "surface.pivot", "must be finite");
    require(std::isfinite(belt_speed), "surface.belt_speed", "must be finite");
}

void GaitConfig::validate() const
{
    require(std::isfinite(step_period) && step_period > 0.0, "gait.step_period", "must be > 0");
    require(std::isfinite(duration) && duration > 0.0, "gait.duration", "must be > 0");
    require(std::isfinite(step_length), "gait.step_length", "must be finite");
    require(std::isfinite(base_height) && base_height > 0.0, "gait.base_height", "must be > 0");
    require(std::isfinite(sway_lateral) && sway_lateral >= 0.0, "gait.sway_lateral", "must be >= 0");
    require(std::isfinite(bob_vertical) && bob_vertical >= 0.0, "gait.bob_vertical", "must be >= 0");
    require(std::isfinite(roll_amplitude) && std::abs(roll_amplitude) < 0.5, "gait.roll_amplitude",
            "must lie in (-0.5, 0.5) rad");
    require(std::isfinite(pitch_amplitude) && std::abs(pitch_amplitude) < 0.5, "gait.pitch_amplitude",
            "must lie in (-0.5, 0.5) rad");
    require(std::isfinite(foot_width) && foot_width >= 0.0, "gait.foot_width", "must be >= 0");
    require(std::isfinite(swap_jitter) && swap_jitter >= 0.0 && swap_jitter < 0.5 * step_period,
            "gait.swap_jitter", "must lie in [0, step_period / 2)");
}

long SensorRates::divisor(double rate) const
{
    const double ratio = imu / rate;
    const long n = std::lround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9)
        throw std::invalid_argument("rates: " + std::to_string(rate) + " Hz does not divide the IMU rate "
                                    + std::to_string(imu) + " Hz");
    return n;
}

void SensorRates::validate() const
{
    require(std::isfinite(imu) && imu >= 10.0, "rates.imu", "must be >= 10 Hz (dt <= 0.1 s)");
    require(std::isfinite(kinematics) && kinematics > 0.0, "rates.kinematics", "must be > 0");
    require(std::isfinite(surface) && surface > 0.0, "rates.surface", "must be > 0");
    require(std::isfinite(truth) && truth > 0.0, "rates.truth", "must be > 0");
    divisor(kinematics);
    divisor(surface);
    divisor(truth);
}

PitchProfile surface_pitch(double t, const SurfaceConfig& cfg)
{
    const double w = cfg.pitch_angular_freq;
    const double s = std::sin(w * t);
    const double c = std::cos(w * t);
    return {cfg.pitch_amplitude * s, cfg.pitch_amplitude * w * c, -cfg.pitch_amplitude * w * w * s};
}

SurfaceState surface_state(double t, const SurfaceConfig& cfg)
{
    const PitchProfile pr = surface_pitch(t, cfg);
    return {so3_exp(Vec3(0.0, pr.theta, 0.0)), Vec3(0.0, pr.rate, 0.0)};
}

TruthTrajectory::TruthTrajectory(const GaitConfig& gait, const SurfaceConfig& surf, double grid_dt,
                                 std::vector<Foothold> footholds)
    : gait_(gait), surf_(surf), grid_dt_(grid_dt), footholds_(std::move(footholds))
{
    if (footholds_.empty() || footholds_.front().touchdown_tick != 0)
        throw std::invalid_argument("TruthTrajectory: first foothold must touch down at tick 0");
}

long TruthTrajectory::numTicks() const
{
    return std::lround(gait_.duration / grid_dt_);
}

int TruthTrajectory::stanceAtTick(long tick) const
{
    const auto it = std::upper_bound(footholds_.begin(), footholds_.end(), tick,
                                     [](long k, const Foothold& f) { return k < f.touchdown_tick; });
    return static_cast<int>(std::distance(footholds_.begin(), it)) - 1;
}

int TruthTrajectory::stanceAt(double t) const
{
    // Touchdowns sit on the tick grid; round so that t == touchdown selects the new foot.
    const double ticks = t / grid_dt_;
    const long k = std::abs(ticks - std::round(ticks)) < 1e-6 ? std::lround(ticks) : static_cast<long>(std::floor(ticks));
    return stanceAtTick(k);
}

TruthPoint TruthTrajectory::base(double t) const
{
    const double T = gait_.step_period;
    const double ws = std::numbers::pi / T;
    const double speed = gait_.step_length / T;
    const PitchProfile pr = surface_pitch(t, surf_);

    // Forward motion and lateral sway (one lateral cycle per two steps).
    const double x = speed * t;
    const double y = gait_.sway_lateral * std::sin(ws * t);
    const double yd = gait_.sway_lateral * ws * std::cos(ws * t);
    const double ydd = -gait_.sway_lateral * ws * ws * std::sin(ws * t);

    // Vertical: nominal height, bob at step frequency, and the surface height under the base.
    const double L = x - surf_.pivot.x();
    const double st = std::sin(pr.theta);
    const double ct = std::cos(pr.theta);
    const double zs = -L * st;
    const double zsd = -speed * st - L * ct * pr.rate;
    const double zsdd = -2.0 * speed * ct * pr.rate - L * (-st * pr.rate * pr.rate + ct * pr.accel);
    const double w2 = 2.0 * ws;
    const double z = surf_.pivot.z() + gait_.base_height + gait_.bob_vertical * std::cos(w2 * t) + zs;
    const double zd = -gait_.bob_vertical * w2 * std::sin(w2 * t) + zsd;
    const double zdd = -gait_.bob_vertical * w2 * w2 * std::cos(w2 * t) + zsdd;

    // Attitude: R = Ry(pitch) Rx(roll), heading fixed.
    const double roll = gait_.roll_amplitude * std::sin(ws * t);
    const double roll_d = gait_.roll_amplitude * ws * std::cos(ws * t);
    const double pitch = gait_.pitch_amplitude * std::sin(w2 * t);
    const double pitch_d = gait_.pitch_amplitude * w2 * std::cos(w2 * t);
    const Mat3 Ry = rotY(pitch);

    TruthPoint out;
    out.x.rot = Rotation(Ry * rotX(roll));
    out.x.position() = Vec3(x, y, z);
    out.x.velocity() = Vec3(speed, yd, zd);
    out.accel = Vec3(0.0, ydd, zdd);
    out.omega = Vec3(0.0, pitch_d, 0.0) + Ry * Vec3(roll_d, 0.0, 0.0);
    return out;
}

Vec3 TruthTrajectory::footPosition(int stance, double t) const
{
    const Foothold& f = footholds_.at(stance);
    const double since = t - static_cast<double>(f.touchdown_tick) * grid_dt_;
    const Vec3 local = f.local + Vec3(surf_.belt_speed * since, 0.0, 0.0);
    return surf_.pivot + surface_state(t, surf_).rot * local;
}

Vec3 TruthTrajectory::footVelocity(int stance, double t) const
{
    const SurfaceState s = surface_state(t, surf_);
    const Vec3 arm = footPosition(stance, t) - surf_.pivot;
    return s.omega.cross(arm) + s.rot * Vec3(surf_.belt_speed, 0.0, 0.0);
}

TruthPoint TruthTrajectory::at(double t, int stance) const
{
    TruthPoint out = base(t);
    out.x.foot() = footPosition(stance, t);
    out.stance = stance;
    return out;
}

TruthTrajectory generate_truth(const GaitConfig& gait, const SurfaceConfig& surf, std::uint64_t seed, double grid_dt)
{
    gait.validate();
    surf.validate();
    if (!(grid_dt > 0.0))
        throw std::invalid_argument("generate_truth: grid_dt must be > 0");

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x67616974u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> jitter(-gait.swap_jitter, gait.swap_jitter);

    const long last_tick = std::lround(gait.duration / grid_dt);
    const double T = gait.step_period;

    auto makeFoothold = [&](long tick, int index) {
        Foothold f;
        f.touchdown_tick = tick;
        f.side = index % 2 == 0 ? StanceFoot::Left : StanceFoot::Right;
        const double t = static_cast<double>(tick) * grid_dt;
        const double lateral = (f.side == StanceFoot::Left ? 0.5 : -0.5) * gait.foot_width;
        f.local = Vec3(gait.step_length / T * t - surf.pivot.x(), lateral, 0.0);
        return f;
    };

    std::vector<Foothold> footholds{makeFoothold(0, 0)};
    for (int k = 1;; ++k) {
        const double nominal = k * T;
        if (nominal >= gait.duration)
            break;
        const double j = gait.swap_jitter > 0.0 ? jitter(rng) : 0.0;
        const long tick = std::lround((nominal + j) / grid_dt);
        if (tick <= footholds.back().touchdown_tick || tick > last_tick)
            continue;
        footholds.push_back(makeFoothold(tick, k));
    }
    return TruthTrajectory(gait, surf, grid_dt, std::move(footholds));
}

std::vector<TruthSample> SensorStream::truthSamples() const
{
    std::vector<TruthSample> out;
    for (const auto& e : events)
        if (const auto* ts = std::get_if<TruthSample>(&e))
            out.push_back(*ts);
    return out;
}

SensorStream synthesize_sensors(const TruthTrajectory& truth, const NoiseParams& noise, const SensorRates& rates,
                                std::uint64_t seed)
{
    rates.validate();
    const double dt = truth.gridDt();
    if (std::abs(dt - rates.imuDt()) > 1e-12)
        throw std::invalid_argument("synthesize_sensors: truth grid does not match the IMU rate");

    const long kin_div = rates.divisor(rates.kinematics);
    const long surf_div = rates.divisor(rates.surface);
    const long truth_div = rates.divisor(rates.truth);
    const long n = truth.numTicks();
    const Constants constants;

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x73656e73u};
    std::mt19937_64 rng(seq);
    GaussianSampler gyro_noise(noise.gyro_cov / dt);
    GaussianSampler accel_noise(noise.accel_cov / dt);
    GaussianSampler contact_noise(noise.contact_vel_cov / dt);
    GaussianSampler fk_noise(noise.fk_pos_cov);
    GaussianSampler orient_noise(noise.surface_orient_cov);
    GaussianSampler jump_noise(noise.jump_cov.block<3, 3>(block::kFoot, block::kFoot));

    const auto& footholds = truth.footholds();
    SensorStream stream;
    stream.events.reserve(static_cast<std::size_t>(n) * 2 + 16);

    int stance = 0;
    TruthPoint cur = truth.at(0.0, 0);
    for (long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const Mat3& R = cur.x.rot.matrix();

        const bool swap = stance + 1 < static_cast<int>(footholds.size())
            && footholds[stance + 1].touchdown_tick == k;
        if (swap) {
            const Vec3 d_old = truth.footPosition(stance, t);
            ++stance;
            const Vec3 d_new = truth.footPosition(stance, t);
            cur.x.foot() = d_new;
            cur.stance = stance;
            stream.events.emplace_back(SwapEvent{t, R.transpose() * (d_new - d_old) + jump_noise.draw(rng)});
        }
        if (k % surf_div == 0) {
            const SurfaceState s = surface_state(t, truth.surface());
            stream.events.emplace_back(SurfacePose{t, s.rot, s.omega});
        }
        if (k % kin_div == 0) {
            const Vec3 hp = R.transpose() * (cur.x.foot() - cur.x.position()) + fk_noise.draw(rng);
            stream.events.emplace_back(FkPosition{t, hp});
            const Rotation Rs = surface_state(t, truth.surface()).rot;
            const Rotation bRf(R.transpose() * Rs.matrix() * so3_exp(orient_noise.draw(rng)).matrix());
            stream.events.emplace_back(FkOrientation{t, bRf});
        }
        if (k % truth_div == 0 || swap)
            stream.events.emplace_back(TruthSample{t, cur.x});
        if (k == n)
            break;

        // Constant inputs that carry the true state across [t, t + dt] under ZOH integration.
        TruthPoint next = truth.at(static_cast<double>(k + 1) * dt, stance);
        const Vec3 phi = so3_log(Rotation(R.transpose() * next.x.rot.matrix()));
        ImuStep u;
        u.t = t;
        u.dt = dt;
        u.gyro = phi / dt;
        const Mat3 RG1 = R * so3_gamma(phi, 1);
        const Vec3 dv = next.x.velocity() - cur.x.velocity() - constants.g * dt;
        u.accel = RG1.partialPivLu().solve(dv / dt);
        u.contact_vel = (next.x.foot() - cur.x.foot()) / dt;

        // Velocity, attitude and foot are matched exactly by the inputs above; a
        // constant acceleration cannot also match the analytic position, so the
        // recorded position follows the same hold recursion (within ~1e-6 m of
        // the analytic curve) to keep the stream exactly self-consistent.
        next.x.position() = cur.x.position() + cur.x.velocity() * dt
            + (R * so3_gamma(phi, 2) * u.accel + 0.5 * constants.g) * dt * dt;

        u.gyro += gyro_noise.draw(rng);
        u.accel += accel_noise.draw(rng);
        u.contact_vel += contact_noise.draw(rng);
        stream.events.emplace_back(u);
        cur = next;
    }
    return stream;
}

}  // namespace drs
