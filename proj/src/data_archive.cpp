#include "wdr/data_archive.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "json.hpp"
#include "wdr/concentration.hpp"
#include "wdr/io_util.hpp"

namespace wdr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class BlockWriter {
public:
    BlockWriter(const std::string& path, int cols) : os_(path, std::ios::binary | std::ios::trunc), cols_(cols) {
        if (!os_) throw std::runtime_error("cannot write block: " + path);
        io::write_u64(os_, 0);  // row count backpatched on close
        io::write_u64(os_, static_cast<std::uint64_t>(cols));
    }

    void append(const Eigen::MatrixXd& rows) {
        for (Eigen::Index i = 0; i < rows.rows(); ++i)
            for (Eigen::Index j = 0; j < rows.cols(); ++j) io::write_f64(os_, rows(i, j));
        count_ += rows.rows();
    }

    void close() {
        os_.seekp(0);
        io::write_u64(os_, static_cast<std::uint64_t>(count_));
        os_.close();
    }

private:
    std::ofstream os_;
    int cols_;
    long long count_ = 0;
};

// One simulation chunk: rows of e at each requested time.
void simulate_chunk(const LinearSystem& sys, const FeedbackLaw& law, const GroundTruth& gt,
                    int rows, int horizon, const std::vector<int>& taus, Rng& rng,
                    Eigen::MatrixXd& e0_out, Eigen::MatrixXd& w_out,
                    std::vector<Eigen::MatrixXd>& anchor_out) {
    const Eigen::MatrixXd acl = law.closed_loop(sys);
    e0_out = sample_noise(gt.p0, rng, rows);
    w_out.resize(rows, sys.d());
    for (std::size_t a = 0; a < taus.size(); ++a) anchor_out[a].resize(rows, sys.n());

    for (int i = 0; i < rows; ++i) {
        Eigen::VectorXd e = e0_out.row(i).transpose();
        int next_anchor = 0;
        for (int t = 0; t <= horizon; ++t) {
            while (next_anchor < static_cast<int>(taus.size()) &&
                   taus[static_cast<std::size_t>(next_anchor)] == t) {
                anchor_out[static_cast<std::size_t>(next_anchor)].row(i) = e.transpose();
                ++next_anchor;
            }
            if (t == horizon) break;
            const Eigen::MatrixXd w = sample_noise(gt.pw, rng, 1);
            if (t == 0) w_out.row(i) = w.row(0);
            e = acl * e + sys.G * w.row(0).transpose();
        }
    }
}

}  // namespace

void generate_error_archive(const std::string& dir, const LinearSystem& sys,
                            const FeedbackLaw& law, const GroundTruth& gt, long long count,
                            const std::vector<int>& taus, std::uint64_t seed) {
    sys.validate();
    if (count < 1) throw std::invalid_argument("generate_error_archive: count must be >= 1");
    if (taus.empty()) throw std::invalid_argument("generate_error_archive: no anchor times");
    if (noise_dim(gt.p0) != sys.n()) throw std::invalid_argument("ground truth p0 dimension mismatch");
    if (noise_dim(gt.pw) != sys.d()) throw std::invalid_argument("ground truth pw dimension mismatch");
    std::vector<int> sorted = taus;
    std::sort(sorted.begin(), sorted.end());

    fs::create_directories(dir);
    BlockWriter e0_writer((fs::path(dir) / "e0.bin").string(), sys.n());
    BlockWriter w_writer((fs::path(dir) / "w.bin").string(), sys.d());
    std::vector<std::unique_ptr<BlockWriter>> anchor_writers;
    for (int tau : sorted)
        anchor_writers.push_back(std::make_unique<BlockWriter>(
            (fs::path(dir) / ("e_tau_" + std::to_string(tau) + ".bin")).string(), sys.n()));

    const int horizon = sorted.back();
    Rng rng(seed);
    const long long chunk = 8192;
    Eigen::MatrixXd e0, w;
    std::vector<Eigen::MatrixXd> anchors(sorted.size());
    for (long long done = 0; done < count;) {
        const int rows = static_cast<int>(std::min(chunk, count - done));
        simulate_chunk(sys, law, gt, rows, horizon, sorted, rng, e0, w, anchors);
        e0_writer.append(e0);
        w_writer.append(w);
        for (std::size_t a = 0; a < sorted.size(); ++a) anchor_writers[a]->append(anchors[a]);
        done += rows;
    }
    e0_writer.close();
    w_writer.close();
    for (auto& writer : anchor_writers) writer->close();

    json manifest;
    manifest["version"] = 1;
    manifest["n"] = sys.n();
    manifest["d"] = sys.d();
    manifest["count"] = count;
    manifest["taus"] = sorted;
    manifest["seed"] = seed;
    io::write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

ArchiveManifest read_manifest(const std::string& dir) {
    const json j = json::parse(io::read_file((fs::path(dir) / "manifest.json").string()));
    ArchiveManifest m;
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw std::runtime_error("data archive: unsupported version");
    m.n = j.at("n").get<int>();
    m.d = j.at("d").get<int>();
    m.count = j.at("count").get<long long>();
    m.taus = j.at("taus").get<std::vector<int>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
}

Eigen::MatrixXd load_block(const std::string& dir, const std::string& name) {
    const std::string path = (fs::path(dir) / (name + ".bin")).string();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open block: " + path);
    const std::uint64_t rows = io::read_u64(is);
    const std::uint64_t cols = io::read_u64(is);
    if (cols == 0 || cols > (1ULL << 16)) throw std::runtime_error("data archive: corrupt block header");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = io::read_f64(is);
    return out;
}

std::vector<AnchorSamples> load_anchor_samples(const std::string& dir) {
    const ArchiveManifest m = read_manifest(dir);
    std::vector<AnchorSamples> out;
    out.reserve(m.taus.size());
    for (int tau : m.taus) {
        AnchorSamples block;
        block.tau = tau;
        block.samples = load_block(dir, "e_tau_" + std::to_string(tau));
        out.push_back(std::move(block));
    }
    return out;
}

ErrorData generate_error_data(const LinearSystem& sys, const FeedbackLaw& law,
                              const GroundTruth& gt, long long count, const std::vector<int>& taus,
                              std::uint64_t seed) {
    sys.validate();
    if (count < 1) throw std::invalid_argument("generate_error_data: count must be >= 1");
    std::vector<int> sorted = taus;
    std::sort(sorted.begin(), sorted.end());
    Rng rng(seed);
    ErrorData data;
    std::vector<Eigen::MatrixXd> anchors(sorted.size());
    simulate_chunk(sys, law, gt, static_cast<int>(count), sorted.back(), sorted, rng, data.e0,
                   data.w, anchors);
    for (std::size_t a = 0; a < sorted.size(); ++a)
        data.anchors.push_back(AnchorSamples{sorted[a], std::move(anchors[a])});
    return data;
}

MomentBounds estimate_moments(const Eigen::MatrixXd& e0, const Eigen::MatrixXd& w,
                              const SupportSpec& support, int p, double beta_moments) {
    if (!(beta_moments > 0.0 && beta_moments < 1.0))
        throw std::invalid_argument("estimate_moments: beta_moments must lie in (0,1)");
    MomentBounds out;
    out.p0 = moment_bound(e0, support.diam_x0, beta_moments / 2.0, p);
    out.pw = moment_bound(w, support.diam_w, beta_moments / 2.0, p);
    return out;
}

}  // namespace wdr
