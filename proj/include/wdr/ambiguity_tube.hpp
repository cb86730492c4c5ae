#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wdr/concentration.hpp"
#include "wdr/linear_system.hpp"
#include "wdr/weighted_atoms.hpp"

namespace wdr {

// Inputs for tube construction. `beta` is split uniformly over the anchor
// sets (beta/J, or beta/(J*L) when a family of projected tubes shares the
// budget); each anchor's share is halved again between the moment estimate
// and the deviation term. The moment bounds moment_p0/moment_pw feed the
// radius dynamics and are estimated separately with their own budget.
struct TubeSpec {
    std::vector<int> taus;
    double beta = 0.05;
    double moment_p0 = 0.0;
    double moment_pw = 0.0;
    int p = 1;  // moment order in the radius dynamics
    int q = 1;  // moment order inside the concentration radius
    double c_g = 1.0;
    int t_max = 200;
    int cluster_k = 100;
    std::uint64_t seed = 0;

    void validate(int data_horizon) const;
};

// Error samples observed at one anchor time.
struct AnchorSamples {
    int tau = 0;
    Eigen::MatrixXd samples;  // N x n
};

// Per-time-step Wasserstein balls for the error distribution: data-driven
// sets at the anchor times, radii everywhere else derived on demand from the
// radius dynamics. Radius queries beyond the precomputed horizon extend the
// cached norm sequences; the tube is otherwise immutable.
class AmbiguityTube {
public:
    struct Anchor {
        int tau = 0;
        WeightedAtoms center;
        double radius = 0.0;  // data-driven radius including the cluster bound
    };

    struct Radius {
        int anchor = 0;  // anchor index, not time
        double eps = 0.0;
    };

    AmbiguityTube() = default;
    AmbiguityTube(Eigen::MatrixXd acl, Eigen::MatrixXd g, Eigen::MatrixXd projection,
                  std::vector<Anchor> anchors, double moment_p0, double moment_pw, double beta,
                  int t_max);

    int anchor_count() const { return static_cast<int>(anchors_.size()); }
    const Anchor& anchor(int j) const { return anchors_.at(static_cast<std::size_t>(j)); }
    const Eigen::MatrixXd& projection() const { return projection_; }
    int state_dim() const { return static_cast<int>(acl_.rows()); }
    int projected_dim() const { return static_cast<int>(projection_.rows()); }
    int t_max() const { return t_max_; }
    double beta() const { return beta_; }
    double moment_p0() const { return moment_p0_; }
    double moment_pw() const { return moment_pw_; }

    // Radius of the derived ambiguity set at time t borrowed from anchor j.
    double f_tau(int j, int t);

    // Anchor selection at time t: pointwise argmin of the f curves on
    // [0, t_max] (ties to the smallest anchor time), the terminal anchor
    // beyond. Memoized.
    int anchor_index_at(int t);

    // Derived radius and its anchor at time t; never errors for t >= 0.
    Radius radius_at(int t);

    // Largest derived radius over anchor j's region; the terminal anchor
    // additionally receives an analytic tail bound so the value dominates
    // f for every t beyond t_max.
    double sup_radius_by_anchor(int j);

    int tail_anchor();

    void check_compatible(const LinearSystem& sys, const FeedbackLaw& law) const;

    void save(std::ostream& os) const;
    static AmbiguityTube load(std::istream& is);
    void save_file(const std::string& path) const;
    static AmbiguityTube load_file(const std::string& path);

private:
    void ensure_horizon(int t);
    double tail_sup_bound(int j);

    Eigen::MatrixXd acl_;         // n x n closed loop
    Eigen::MatrixXd g_;           // n x d
    Eigen::MatrixXd projection_;  // l x n
    std::vector<Anchor> anchors_;
    double moment_p0_ = 0.0;
    double moment_pw_ = 0.0;
    double beta_ = 0.0;
    int t_max_ = 0;

    // caches, extended lazily
    std::vector<Eigen::MatrixXd> acl_pow_;   // A_cl^i
    std::vector<double> norm_ma_;            // |M A_cl^i|
    std::vector<double> norm_mag_;           // |M A_cl^i G|
    std::vector<double> prefix_mag_;         // sum_{i<k} |M A_cl^i G|
    std::vector<Radius> radius_memo_;        // per t <= t_max
    int tail_anchor_ = -1;
};

// Builds the data-driven anchors (project, cluster, concentration radius
// plus cluster inflation) and wraps them with the radius dynamics.
// budget_parts is J for a standalone tube and J*L inside a family.
AmbiguityTube build_tube(const std::vector<AnchorSamples>& data, const LinearSystem& sys,
                         const FeedbackLaw& law, const TubeSpec& spec, const SupportSpec& support,
                         const Eigen::MatrixXd& projection, int budget_parts = 0);

// Family of projected tubes sharing the anchor times and the beta budget.
struct LowDimFamily {
    std::vector<AmbiguityTube> tubes;
};

LowDimFamily build_family(const std::vector<AnchorSamples>& data, const LinearSystem& sys,
                          const FeedbackLaw& law, const TubeSpec& spec, const SupportSpec& support,
                          const std::vector<Eigen::MatrixXd>& projections);

// Greedy anchor-time selection: seed with the data horizon, then repeatedly
// add the time that most reduces the largest derived radius over a time
// grid, radii evaluated with zero data-driven term.
std::vector<int> select_taus(int data_horizon, int count, const LinearSystem& sys,
                             const FeedbackLaw& law, const TubeSpec& spec);

}  // namespace wdr
