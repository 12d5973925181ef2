#pragma once

#include <vector>

#include <Eigen/Core>

#include "vimu/signal.hpp"

namespace vimu {

enum class EmbeddingRole { Text, Pose, ImuLeft, ImuRight, Query, Key };

/// N x D matrix of modality embeddings, one row per sample. Rows must be
/// finite and nonzero (cosine similarity is undefined on zero rows).
class EmbeddingBatch {
public:
    explicit EmbeddingBatch(Eigen::MatrixXd data, EmbeddingRole role = EmbeddingRole::Query);

    const Eigen::MatrixXd& data() const { return data_; }
    Eigen::Index rows() const { return data_.rows(); }
    Eigen::Index cols() const { return data_.cols(); }
    EmbeddingRole role() const { return role_; }

private:
    Eigen::MatrixXd data_;
    EmbeddingRole role_;
};

struct LossConfig {
    double temperature = 0.07;
};

/// Per-timestep class ids over one window; ids must lie in [0, num_classes).
struct LabelWindow {
    std::vector<int> ids;
    int num_classes = 0;
};

/// S(i, j) = q_i . k_j / (|q_i| |k_j|). All kernels below fix the order of
/// summation (sequential index order) so results are bit-stable.
Eigen::MatrixXd cosine_similarity_matrix(const EmbeddingBatch& q, const EmbeddingBatch& k);

/// Contrastive loss over temperature-scaled cosine similarities:
///   -(1/N) sum_i log( exp(S_ii / tau) / sum_j exp(S_ij / tau) )
/// with the full row (positive included) in the denominator, computed via
/// log-sum-exp. Zero for N = 1; at most log N + 2 / tau.
double info_nce(const EmbeddingBatch& q, const EmbeddingBatch& k, const LossConfig& cfg = {});

struct InfoNceGradients {
    Eigen::MatrixXd dq;
    Eigen::MatrixXd dk;
};

/// Analytic gradient of info_nce through the softmax and the cosine
/// normalization, for use by external trainers.
InfoNceGradients info_nce_grad(const EmbeddingBatch& q, const EmbeddingBatch& k,
                               const LossConfig& cfg = {});

/// Sum of the six ordered pair losses
///   (text,pose) (text,imu_l) (text,imu_r) (pose,imu_l) (pose,imu_r) (imu_l,imu_r).
/// With symmetrize, each pair is averaged with its reversed direction.
double contrastive_total(const EmbeddingBatch& text, const EmbeddingBatch& pose,
                         const EmbeddingBatch& imu_left, const EmbeddingBatch& imu_right,
                         const LossConfig& cfg = {}, bool symmetrize = false);

/// Two-decoder regression loss: per window, the timestep mean of
/// (target - pose_pred)^2 + (target - imu_pred)^2, each squared error taken
/// as the mean over channels; reduced by mean over the batch.
double mse_multitask(const std::vector<ImuWindow>& target,
                     const std::vector<ImuWindow>& pose_pred,
                     const std::vector<ImuWindow>& imu_pred);

/// Windowed cross-entropy: per window, the sum over timesteps of
/// -log softmax(logits)[label]; reduced by mean over the batch. Each
/// logits matrix is timesteps x classes.
double cross_entropy(const std::vector<Eigen::MatrixXd>& logits,
                     const std::vector<LabelWindow>& labels);

}  // namespace vimu
