#include "wdr/ambiguity_tube.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wdr/io_util.hpp"
#include "wdr/scenario_reduction.hpp"

namespace wdr {

namespace {

constexpr std::uint64_t kTubeMagic = 0x31454255545244ULL;  // "WDRTUBE1"

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void TubeSpec::validate(int data_horizon) const {
    require(!taus.empty(), "TubeSpec: needs at least one anchor time");
    std::set<int> uniq(taus.begin(), taus.end());
    require(uniq.size() == taus.size(), "TubeSpec: anchor times must be distinct");
    require(*uniq.begin() >= 0, "TubeSpec: anchor times must be >= 0");
    if (data_horizon >= 0)
        require(*uniq.rbegin() <= data_horizon, "TubeSpec: anchor beyond the data horizon");
    require(beta > 0.0 && beta < 1.0, "TubeSpec: beta must lie in (0,1)");
    require(t_max >= *uniq.rbegin(), "TubeSpec: t_max must cover the anchors");
    require(cluster_k >= 1, "TubeSpec: cluster_k must be >= 1");
    require(p >= 1 && q >= 1, "TubeSpec: moment orders must be >= 1");
    require(moment_p0 >= 0.0 && moment_pw >= 0.0, "TubeSpec: moments must be >= 0");
}

AmbiguityTube::AmbiguityTube(Eigen::MatrixXd acl, Eigen::MatrixXd g, Eigen::MatrixXd projection,
                             std::vector<Anchor> anchors, double moment_p0, double moment_pw,
                             double beta, int t_max)
    : acl_(std::move(acl)),
      g_(std::move(g)),
      projection_(std::move(projection)),
      anchors_(std::move(anchors)),
      moment_p0_(moment_p0),
      moment_pw_(moment_pw),
      beta_(beta),
      t_max_(t_max) {
    require(!anchors_.empty(), "AmbiguityTube: needs at least one anchor");
    std::sort(anchors_.begin(), anchors_.end(),
              [](const Anchor& a, const Anchor& b) { return a.tau < b.tau; });
    for (const auto& a : anchors_) require(a.radius >= 0.0, "AmbiguityTube: negative radius");
    require(projection_.cols() == acl_.rows(), "AmbiguityTube: projection shape mismatch");
    ensure_horizon(t_max_);
}

void AmbiguityTube::ensure_horizon(int t) {
    if (static_cast<int>(norm_mag_.size()) > t) return;
    if (acl_pow_.empty()) {
        acl_pow_.push_back(Eigen::MatrixXd::Identity(acl_.rows(), acl_.cols()));
        norm_ma_.push_back(operator_norm(projection_));
        norm_mag_.push_back(operator_norm(projection_ * g_));
        prefix_mag_.push_back(0.0);
    }
    while (static_cast<int>(norm_mag_.size()) <= t) {
        const Eigen::MatrixXd next = acl_ * acl_pow_.back();
        prefix_mag_.push_back(prefix_mag_.back() + norm_mag_.back());
        acl_pow_.push_back(next);
        norm_ma_.push_back(operator_norm(projection_ * next));
        norm_mag_.push_back(operator_norm(projection_ * next * g_));
    }
}

double AmbiguityTube::f_tau(int j, int t) {
    require(j >= 0 && j < anchor_count(), "f_tau: unknown anchor");
    require(t >= 0, "f_tau: t must be >= 0");
    const Anchor& a = anchors_[static_cast<std::size_t>(j)];
    const int tau = a.tau;
    const int hi = std::max(tau, t);
    ensure_horizon(hi);

    if (t == tau) return a.radius;
    const double shift_norm =
        operator_norm(projection_ * (acl_pow_[static_cast<std::size_t>(tau)] -
                                     acl_pow_[static_cast<std::size_t>(t)]));
    const int lo = std::min(tau, t);
    const double noise_sum = prefix_mag_[static_cast<std::size_t>(hi)] -
                             prefix_mag_[static_cast<std::size_t>(lo)];
    return a.radius + shift_norm * moment_p0_ + moment_pw_ * noise_sum;
}

int AmbiguityTube::anchor_index_at(int t) {
    require(t >= 0, "anchor_index_at: t must be >= 0");
    if (t > t_max_) return tail_anchor();
    if (radius_memo_.empty()) radius_memo_.assign(static_cast<std::size_t>(t_max_) + 1, Radius{-1, 0.0});
    Radius& memo = radius_memo_[static_cast<std::size_t>(t)];
    if (memo.anchor < 0) {
        int best = 0;
        double best_eps = f_tau(0, t);
        for (int j = 1; j < anchor_count(); ++j) {
            const double eps = f_tau(j, t);
            if (eps < best_eps) {  // strict: ties keep the smallest anchor time
                best_eps = eps;
                best = j;
            }
        }
        memo = Radius{best, best_eps};
    }
    return memo.anchor;
}

AmbiguityTube::Radius AmbiguityTube::radius_at(int t) {
    if (t > t_max_) {
        const int j = tail_anchor();
        return Radius{j, f_tau(j, t)};
    }
    anchor_index_at(t);
    return radius_memo_[static_cast<std::size_t>(t)];
}

int AmbiguityTube::tail_anchor() {
    if (tail_anchor_ < 0) tail_anchor_ = anchor_index_at(t_max_);
    return tail_anchor_;
}

double AmbiguityTube::tail_sup_bound(int j) {
    // Dominates f_tau(j, t) for every t > t_max. Uses a contraction block:
    // the smallest s with |A_cl^s| < 1 gives |X A_cl^{i+ks}| <= q^k |X A_cl^i|
    // by submultiplicativity, so everything beyond t_max is covered by one
    // extra block and a geometric series. Refused when no computed power is
    // contractive.
    const Anchor& a = anchors_[static_cast<std::size_t>(j)];
    const int h = t_max_;
    ensure_horizon(h);

    int s = -1;
    double q = 1.0;
    Eigen::MatrixXd pow_s;
    for (int i = 1; i <= h; ++i) {
        const double norm = operator_norm(acl_pow_[static_cast<std::size_t>(i)]);
        if (norm < 1.0) {
            s = i;
            q = norm;
            pow_s = acl_pow_[static_cast<std::size_t>(i)];
            break;
        }
    }
    if (s < 0)
        throw std::runtime_error(
            "ambiguity tube: no contractive closed-loop power within t_max; increase t_max");

    ensure_horizon(h + s);

    // sum_{i >= h} |M A^i G| <= |M| (sum_{r < s} |A^{h+r} G|) / (1 - q);
    // the projection cannot be kept inside the block because it does not
    // commute past A^{ks} G
    double block = 0.0;
    for (int r = 0; r < s; ++r)
        block += operator_norm(acl_pow_[static_cast<std::size_t>(h + r)] * g_);
    const double tail_sum = operator_norm(projection_) * block / (1.0 - q);
    const double noise_sum = prefix_mag_[static_cast<std::size_t>(h)] -
                             prefix_mag_[static_cast<std::size_t>(a.tau)] + tail_sum;

    // sup_{t > t_max} |M A^t| <= max over one block past t_max
    double sup_ma = 0.0;
    for (int r = 1; r <= s; ++r)
        sup_ma = std::max(sup_ma, norm_ma_[static_cast<std::size_t>(h + r)]);
    const double shift_bound = norm_ma_[static_cast<std::size_t>(a.tau)] + sup_ma;

    return a.radius + shift_bound * moment_p0_ + moment_pw_ * noise_sum;
}

double AmbiguityTube::sup_radius_by_anchor(int j) {
    require(j >= 0 && j < anchor_count(), "sup_radius_by_anchor: unknown anchor");
    double sup = anchors_[static_cast<std::size_t>(j)].radius;
    for (int t = 0; t <= t_max_; ++t)
        if (anchor_index_at(t) == j) sup = std::max(sup, radius_at(t).eps);
    if (j == tail_anchor()) sup = std::max(sup, tail_sup_bound(j));
    return sup;
}

void AmbiguityTube::check_compatible(const LinearSystem& sys, const FeedbackLaw& law) const {
    if (sys.n() != state_dim() || sys.d() != g_.cols())
        throw std::invalid_argument("ambiguity tube: system dimensions do not match the tube");
    const Eigen::MatrixXd acl = law.closed_loop(sys);
    if ((acl - acl_).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("ambiguity tube: closed-loop matrix does not match the tube");
}

namespace {

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    io::write_u64(os, static_cast<std::uint64_t>(m.rows()));
    io::write_u64(os, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) io::write_f64(os, m(i, j));
}

Eigen::MatrixXd read_matrix(std::istream& is) {
    const std::uint64_t rows = io::read_u64(is);
    const std::uint64_t cols = io::read_u64(is);
    if (rows > (1ULL << 20) || cols > (1ULL << 20)) throw std::runtime_error("tube file: corrupt matrix header");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = io::read_f64(is);
    return m;
}

}  // namespace

void AmbiguityTube::save(std::ostream& os) const {
    std::ostringstream payload(std::ios::binary);
    write_matrix(payload, acl_);
    write_matrix(payload, g_);
    write_matrix(payload, projection_);
    io::write_f64(payload, moment_p0_);
    io::write_f64(payload, moment_pw_);
    io::write_f64(payload, beta_);
    io::write_u64(payload, static_cast<std::uint64_t>(t_max_));
    io::write_u64(payload, static_cast<std::uint64_t>(anchors_.size()));
    for (const auto& a : anchors_) {
        io::write_u64(payload, static_cast<std::uint64_t>(a.tau));
        io::write_f64(payload, a.radius);
        write_atoms(payload, a.center);
    }
    const std::string body = payload.str();
    io::write_u64(os, kTubeMagic);
    io::write_u64(os, 1);  // version
    io::write_u64(os, body.size());
    io::write_u64(os, io::fnv1a(body));
    os.write(body.data(), static_cast<std::streamsize>(body.size()));
}

AmbiguityTube AmbiguityTube::load(std::istream& is) {
    if (io::read_u64(is) != kTubeMagic) throw std::runtime_error("tube file: bad magic");
    const std::uint64_t version = io::read_u64(is);
    if (version != 1) throw std::runtime_error("tube file: unsupported version");
    const std::uint64_t size = io::read_u64(is);
    const std::uint64_t checksum = io::read_u64(is);
    std::string body(size, '\0');
    is.read(body.data(), static_cast<std::streamsize>(size));
    if (static_cast<std::uint64_t>(is.gcount()) != size)
        throw std::runtime_error("tube file: truncated");
    if (io::fnv1a(body) != checksum) throw std::runtime_error("tube file: checksum mismatch");

    std::istringstream payload(body, std::ios::binary);
    Eigen::MatrixXd acl = read_matrix(payload);
    Eigen::MatrixXd g = read_matrix(payload);
    Eigen::MatrixXd projection = read_matrix(payload);
    const double m0 = io::read_f64(payload);
    const double mw = io::read_f64(payload);
    const double beta = io::read_f64(payload);
    const int t_max = static_cast<int>(io::read_u64(payload));
    const std::uint64_t count = io::read_u64(payload);
    std::vector<Anchor> anchors;
    anchors.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Anchor a;
        a.tau = static_cast<int>(io::read_u64(payload));
        a.radius = io::read_f64(payload);
        a.center = read_atoms(payload);
        anchors.push_back(std::move(a));
    }
    return AmbiguityTube(std::move(acl), std::move(g), std::move(projection), std::move(anchors),
                         m0, mw, beta, t_max);
}

void AmbiguityTube::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write tube file: " + path);
    save(os);
}

AmbiguityTube AmbiguityTube::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open tube file: " + path);
    return load(is);
}

AmbiguityTube build_tube(const std::vector<AnchorSamples>& data, const LinearSystem& sys,
                         const FeedbackLaw& law, const TubeSpec& spec, const SupportSpec& support,
                         const Eigen::MatrixXd& projection, int budget_parts) {
    sys.validate();
    spec.validate(-1);
    require(!data.empty(), "build_tube: no anchor samples");
    require(data.size() == spec.taus.size(), "build_tube: anchor sample blocks must match taus");
    require(projection.cols() == sys.n(), "build_tube: projection shape mismatch");

    const double margin = stability_margin(sys, law);
    if (margin >= 1.0)
        throw std::runtime_error("build_tube: closed loop is not stable (spectral radius " +
                                 std::to_string(margin) + ")");

    const int parts = budget_parts > 0 ? budget_parts : static_cast<int>(spec.taus.size());
    const double share = spec.beta / static_cast<double>(parts);
    const double proj_norm = operator_norm(projection);

    std::vector<AmbiguityTube::Anchor> anchors;
    anchors.reserve(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        const AnchorSamples& block = data[j];
        require(block.tau == spec.taus[j], "build_tube: sample block order must match taus");
        if (block.samples.rows() < 1) throw std::invalid_argument("build_tube: insufficient samples");
        require(block.samples.cols() == sys.n(), "build_tube: sample dimension mismatch");

        const Eigen::MatrixXd projected = block.samples * projection.transpose();
        const double phi = support_diameter_bound(sys, law, support, block.tau) * proj_norm;

        ConcentrationParams params;
        params.q = spec.q;
        params.beta1 = share / 2.0;
        params.beta2 = share / 2.0;
        params.c_g = spec.c_g;
        const double eps_data = concentration_radius(projected, phi, params);

        ClusterResult reduced =
            cluster(empirical(projected), spec.cluster_k, spec.seed + 0x9e37 * (j + 1));

        AmbiguityTube::Anchor anchor;
        anchor.tau = block.tau;
        anchor.center = std::move(reduced.reduced);
        anchor.radius = eps_data + reduced.cost_bound;
        anchors.push_back(std::move(anchor));
    }

    return AmbiguityTube(law.closed_loop(sys), sys.G, projection, std::move(anchors),
                         spec.moment_p0, spec.moment_pw, spec.beta, spec.t_max);
}

LowDimFamily build_family(const std::vector<AnchorSamples>& data, const LinearSystem& sys,
                          const FeedbackLaw& law, const TubeSpec& spec, const SupportSpec& support,
                          const std::vector<Eigen::MatrixXd>& projections) {
    require(!projections.empty(), "build_family: needs at least one projection");
    const int parts = static_cast<int>(spec.taus.size() * projections.size());
    LowDimFamily family;
    family.tubes.reserve(projections.size());
    for (const auto& m : projections)
        family.tubes.push_back(build_tube(data, sys, law, spec, support, m, parts));
    return family;
}

std::vector<int> select_taus(int data_horizon, int count, const LinearSystem& sys,
                             const FeedbackLaw& law, const TubeSpec& spec) {
    require(data_horizon >= 0, "select_taus: data horizon must be >= 0");
    require(count >= 1 && count <= data_horizon + 1, "select_taus: count must be in [1, H+1]");

    const int grid = std::max(spec.t_max, data_horizon);
    const NormSequences seq = norm_sequences(sys, law, grid + 1);
    std::vector<double> prefix(static_cast<std::size_t>(grid) + 2, 0.0);
    for (int i = 0; i <= grid; ++i)
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] + seq.acl_pow_g_norm[static_cast<std::size_t>(i)];

    // power-difference norms are approximated by the triangle inequality here;
    // only the selection heuristic depends on them
    auto f_proxy = [&](int tau, int t) {
        const double shift =
            t == tau ? 0.0
                     : std::min(seq.acl_pow_norm[static_cast<std::size_t>(tau)] +
                                    seq.acl_pow_norm[static_cast<std::size_t>(t)],
                                2.0 * seq.acl_pow_norm[static_cast<std::size_t>(std::min(tau, t))]);
        const int lo = std::min(tau, t);
        const int hi = std::max(tau, t);
        return shift * spec.moment_p0 +
               spec.moment_pw * (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]);
    };

    std::vector<int> chosen{data_horizon};
    std::vector<bool> used(static_cast<std::size_t>(data_horizon) + 1, false);
    used[static_cast<std::size_t>(data_horizon)] = true;

    auto objective = [&](const std::vector<int>& taus) {
        double sup = 0.0;
        for (int t = 0; t <= grid; ++t) {
            double best = std::numeric_limits<double>::infinity();
            for (int tau : taus) best = std::min(best, f_proxy(tau, t));
            sup = std::max(sup, best);
        }
        return sup;
    };

    while (static_cast<int>(chosen.size()) < count) {
        int best_tau = -1;
        double best_obj = std::numeric_limits<double>::infinity();
        for (int tau = 0; tau <= data_horizon; ++tau) {
            if (used[static_cast<std::size_t>(tau)]) continue;
            chosen.push_back(tau);
            const double obj = objective(chosen);
            chosen.pop_back();
            if (obj < best_obj) {  // strict: ties keep the smallest candidate
                best_obj = obj;
                best_tau = tau;
            }
        }
        chosen.push_back(best_tau);
        used[static_cast<std::size_t>(best_tau)] = true;
    }

    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace wdr
