#include "vimu/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vimu/errors.hpp"

namespace vimu {

EmbeddingBatch::EmbeddingBatch(Eigen::MatrixXd data, EmbeddingRole role)
    : data_(std::move(data)), role_(role) {
    if (data_.rows() < 1 || data_.cols() < 1) {
        throw ValidationError("embedding batch: empty");
    }
    if (!data_.allFinite()) {
        throw ValidationError("embedding batch: non-finite entry");
    }
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
        if (data_.row(i).norm() == 0.0) {
            throw ValidationError("embedding batch: zero row " + std::to_string(i));
        }
    }
}

namespace {

void require_same_shape(const EmbeddingBatch& q, const EmbeddingBatch& k) {
    if (q.rows() != k.rows() || q.cols() != k.cols()) {
        throw ValidationError("embedding batches differ in shape");
    }
}

void require_temperature(const LossConfig& cfg) {
    if (!(cfg.temperature > 0.0) || !std::isfinite(cfg.temperature)) {
        throw ValidationError("temperature must be positive and finite");
    }
}

double sequential_dot(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                      Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index d = 0; d < a.cols(); ++d) s += a(i, d) * b(j, d);
    return s;
}

std::vector<double> row_norms(const Eigen::MatrixXd& m) {
    std::vector<double> n(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        n[static_cast<std::size_t>(i)] = std::sqrt(sequential_dot(m, i, m, i));
    }
    return n;
}

}  // namespace

Eigen::MatrixXd cosine_similarity_matrix(const EmbeddingBatch& q, const EmbeddingBatch& k) {
    require_same_shape(q, k);
    const Eigen::Index n = q.rows();
    const auto nq = row_norms(q.data());
    const auto nk = row_norms(k.data());
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double c = sequential_dot(q.data(), i, k.data(), j) /
                             (nq[static_cast<std::size_t>(i)] * nk[static_cast<std::size_t>(j)]);
            // Rounding can push a parallel pair a ulp past +-1.
            s(i, j) = std::clamp(c, -1.0, 1.0);
        }
    }
    return s;
}

double info_nce(const EmbeddingBatch& q, const EmbeddingBatch& k, const LossConfig& cfg) {
    require_temperature(cfg);
    const Eigen::MatrixXd s = cosine_similarity_matrix(q, k);
    const Eigen::Index n = s.rows();
    const double inv_tau = 1.0 / cfg.temperature;

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double m = s(i, 0) * inv_tau;
        for (Eigen::Index j = 1; j < n; ++j) m = std::max(m, s(i, j) * inv_tau);
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) sum += std::exp(s(i, j) * inv_tau - m);
        total += m + std::log(sum) - s(i, i) * inv_tau;
    }
    return total / static_cast<double>(n);
}

InfoNceGradients info_nce_grad(const EmbeddingBatch& q, const EmbeddingBatch& k,
                               const LossConfig& cfg) {
    require_temperature(cfg);
    require_same_shape(q, k);
    const Eigen::Index n = q.rows();
    const Eigen::Index dim = q.cols();
    const auto nq = row_norms(q.data());
    const auto nk = row_norms(k.data());
    const double inv_tau = 1.0 / cfg.temperature;

    // Unit rows and similarities.
    Eigen::MatrixXd u(n, dim), v(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        u.row(i) = q.data().row(i) / nq[static_cast<std::size_t>(i)];
        v.row(i) = k.data().row(i) / nk[static_cast<std::size_t>(i)];
    }
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double acc = 0.0;
            for (Eigen::Index d = 0; d < dim; ++d) acc += u(i, d) * v(j, d);
            s(i, j) = acc;
        }
    }

    // dL/dS = (softmax - identity) / (N tau), row-wise softmax of S / tau.
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double m = s(i, 0) * inv_tau;
        for (Eigen::Index j = 1; j < n; ++j) m = std::max(m, s(i, j) * inv_tau);
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) sum += std::exp(s(i, j) * inv_tau - m);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double p = std::exp(s(i, j) * inv_tau - m) / sum;
            g(i, j) = (p - (i == j ? 1.0 : 0.0)) * inv_tau / static_cast<double>(n);
        }
    }

    // Chain through the cosine normalization:
    //   dS_ij/dq_i = (v_j - S_ij u_i) / |q_i|,  dS_ij/dk_j = (u_i - S_ij v_j) / |k_j|.
    InfoNceGradients out;
    out.dq = Eigen::MatrixXd::Zero(n, dim);
    out.dk = Eigen::MatrixXd::Zero(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double gij = g(i, j);
            const double sij = s(i, j);
            for (Eigen::Index d = 0; d < dim; ++d) {
                out.dq(i, d) += gij * (v(j, d) - sij * u(i, d)) / nq[static_cast<std::size_t>(i)];
                out.dk(j, d) += gij * (u(i, d) - sij * v(j, d)) / nk[static_cast<std::size_t>(j)];
            }
        }
    }
    return out;
}

double contrastive_total(const EmbeddingBatch& text, const EmbeddingBatch& pose,
                         const EmbeddingBatch& imu_left, const EmbeddingBatch& imu_right,
                         const LossConfig& cfg, bool symmetrize) {
    const auto pair_loss = [&](const EmbeddingBatch& a, const EmbeddingBatch& b) {
        if (!symmetrize) return info_nce(a, b, cfg);
        return 0.5 * (info_nce(a, b, cfg) + info_nce(b, a, cfg));
    };
    return pair_loss(text, pose) + pair_loss(text, imu_left) + pair_loss(text, imu_right) +
           pair_loss(pose, imu_left) + pair_loss(pose, imu_right) +
           pair_loss(imu_left, imu_right);
}

namespace {

void require_window_shapes(const std::vector<ImuWindow>& a, const std::vector<ImuWindow>& b,
                           const char* what) {
    if (a.size() != b.size()) {
        throw ValidationError(std::string(what) + ": batch sizes differ");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].data.rows() != b[i].data.rows() || a[i].data.cols() != b[i].data.cols()) {
            throw ValidationError(std::string(what) + ": window " + std::to_string(i) +
                                  " shapes differ");
        }
    }
}

}  // namespace

double mse_multitask(const std::vector<ImuWindow>& target,
                     const std::vector<ImuWindow>& pose_pred,
                     const std::vector<ImuWindow>& imu_pred) {
    if (target.empty()) {
        throw ValidationError("mse: empty batch");
    }
    require_window_shapes(target, pose_pred, "mse pose_pred");
    require_window_shapes(target, imu_pred, "mse imu_pred");

    double total = 0.0;
    for (std::size_t w = 0; w < target.size(); ++w) {
        const auto& xv = target[w].data;
        const auto& xp = pose_pred[w].data;
        const auto& xs = imu_pred[w].data;
        const Eigen::Index len = xv.cols();
        const Eigen::Index channels = xv.rows();
        double win = 0.0;
        for (Eigen::Index t = 0; t < len; ++t) {
            double step = 0.0;
            for (Eigen::Index c = 0; c < channels; ++c) {
                const double ep = xv(c, t) - xp(c, t);
                const double es = xv(c, t) - xs(c, t);
                step += ep * ep + es * es;
            }
            win += step / static_cast<double>(channels);
        }
        total += win / static_cast<double>(len);
    }
    return total / static_cast<double>(target.size());
}

double cross_entropy(const std::vector<Eigen::MatrixXd>& logits,
                     const std::vector<LabelWindow>& labels) {
    if (logits.empty() || logits.size() != labels.size()) {
        throw ValidationError("cross_entropy: logits/labels batch sizes differ or empty");
    }
    double total = 0.0;
    for (std::size_t w = 0; w < logits.size(); ++w) {
        const Eigen::MatrixXd& lg = logits[w];
        const LabelWindow& lw = labels[w];
        if (lw.num_classes < 2) {
            throw ValidationError("cross_entropy: need >= 2 classes");
        }
        if (lg.cols() != lw.num_classes ||
            lg.rows() != static_cast<Eigen::Index>(lw.ids.size())) {
            throw ValidationError("cross_entropy: window " + std::to_string(w) +
                                  " shape mismatch");
        }
        if (!lg.allFinite()) {
            throw ValidationError("cross_entropy: non-finite logit in window " +
                                  std::to_string(w));
        }
        double win = 0.0;
        for (Eigen::Index t = 0; t < lg.rows(); ++t) {
            const int y = lw.ids[static_cast<std::size_t>(t)];
            if (y < 0 || y >= lw.num_classes) {
                throw ValidationError("cross_entropy: label " + std::to_string(y) +
                                      " out of range [0, " + std::to_string(lw.num_classes) +
                                      ")");
            }
            double m = lg(t, 0);
            for (Eigen::Index c = 1; c < lg.cols(); ++c) m = std::max(m, lg(t, c));
            double sum = 0.0;
            for (Eigen::Index c = 0; c < lg.cols(); ++c) sum += std::exp(lg(t, c) - m);
            win += m + std::log(sum) - lg(t, y);
        }
        total += win;
    }
    return total / static_cast<double>(logits.size());
}

}  // namespace vimu
