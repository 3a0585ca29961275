#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "genaug/corpus.hpp"

namespace genaug {

struct DetectorConfig {
    int embed_dim = 300;
    double dropout = 0.3;
    int conv_filters = 100;
    int kernel_width = 4;
    int pool_width = 4;
    int hidden = 100;
    int max_len = 30;
    int vocab_size = 0;

    int conv_frames() const { return max_len - kernel_width + 1; }
    int pooled_frames() const { return conv_frames() / pool_width; }
    void validate() const;
};

// All trainable tensors. Biases and the output head are stored as column
// matrices so one visitor covers Adam, serialization and gradient checks.
struct DetectorParams {
    Eigen::MatrixXd embedding;              // V x E
    Eigen::MatrixXd conv_w;                 // F x (K*E)
    Eigen::MatrixXd conv_b;                 // F x 1
    Eigen::MatrixXd wz_in, wz_rec, bz;      // H x F, H x H, H x 1
    Eigen::MatrixXd wr_in, wr_rec, br;
    Eigen::MatrixXd wh_in, wh_rec, bh;
    Eigen::MatrixXd out_w;                  // H x 1
    Eigen::MatrixXd out_b;                  // 1 x 1

    static DetectorParams zeros(const DetectorConfig& cfg);
    static DetectorParams init(const DetectorConfig& cfg, std::uint64_t seed);

    std::vector<Eigen::MatrixXd*> tensors();
    std::vector<const Eigen::MatrixXd*> tensors() const;
    static const std::vector<std::string>& names();
    bool all_finite() const;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batch_size = 32;
    int max_epochs = 20;
    int patience = 3;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
};

struct ForwardCache {
    std::vector<std::int32_t> ids;
    Eigen::MatrixXd embedded;       // L x E, after dropout
    Eigen::MatrixXd dropout_mask;   // L x E (all ones when off)
    Eigen::MatrixXd conv_pre;       // T1 x F
    Eigen::MatrixXd pooled;         // T2 x F
    Eigen::MatrixXi pool_argmax;    // T2 x F, frame index into conv rows
    Eigen::MatrixXd gru_z, gru_r, gru_c, gru_h;  // H x T2 each
    Eigen::VectorXi global_argmax;  // H, time index
    Eigen::VectorXd global_out;     // H
    double logit = 0.0;
    double prob = 0.0;
};

struct Prediction {
    double posterior = 0.0;
    double tau = 0.7;
    Label label = Label::non_hate;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainingHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;     // -1 when no validation slice
    int stopped_epoch = 0;   // last epoch actually run
    bool early_stopped = false;
};

class DetectorModel {
public:
    DetectorModel() = default;
    DetectorModel(const DetectorConfig& cfg, const Vocabulary& vocab, std::uint64_t seed);

    // Pipeline: embedding -> dropout (train) -> valid 1D conv + ReLU ->
    // width-4 max pool -> GRU -> global max pool over time -> affine -> sigmoid.
    double forward(const std::vector<std::int32_t>& token_ids, bool train_mode,
                   std::uint64_t seed, ForwardCache* cache = nullptr) const;

    // Accumulates dLoss/dparams into `grads` given dLoss/dlogit.
    void backward(const ForwardCache& cache, double dlogit, DetectorParams& grads) const;

    void adam_step(const DetectorParams& grads, const TrainConfig& tcfg);

    Prediction classify(const std::vector<std::int32_t>& token_ids, double tau) const;
    double predict_text(const std::string& text, bool already_tokenized = false) const;

    std::vector<std::int32_t> encode(const std::string& text) const;  // tokenize, encode, pad

    const DetectorConfig& config() const { return cfg_; }
    const Vocabulary& vocabulary() const { return vocab_; }
    DetectorParams& params() { return params_; }
    const DetectorParams& params() const { return params_; }

    void save(std::ostream& os) const;
    static DetectorModel load(std::istream& is);
    void save(const std::string& path) const;
    static DetectorModel load_file(const std::string& path);

private:
    DetectorConfig cfg_;
    Vocabulary vocab_;
    DetectorParams params_;
    DetectorParams adam_m_, adam_v_;
    long adam_step_ = 0;
};

struct TrainedDetector {
    DetectorModel model;
    TrainingHistory history;
};

// Mini-batch Adam on binary cross-entropy with a seed-keyed validation slice
// and patience-based early stopping; returns the best-validation checkpoint.
TrainedDetector train_detector(const Dataset& train, const Vocabulary& vocab,
                               const DetectorConfig& dcfg, const TrainConfig& tcfg);

double bce_loss(double prob, double target);

void save_history_csv(const TrainingHistory& h, const std::string& path);

// Mean BCE of the model over a dataset, dropout off.
double evaluate_loss(const DetectorModel& m, const std::vector<std::vector<std::int32_t>>& ids,
                     const std::vector<double>& targets);

}  // namespace genaug
