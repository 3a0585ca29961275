#include "genaug/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "genaug/rng.hpp"

namespace genaug {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr char kMagic[8] = {'G', 'A', 'D', 'E', 'T', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void DetectorConfig::validate() const {
    if (embed_dim < 1 || conv_filters < 1 || kernel_width < 1 || pool_width < 1 || hidden < 1 ||
        max_len < 1 || vocab_size < 1)
        throw UsageError("detector config sizes must be positive");
    if (kernel_width > max_len) throw UsageError("kernel width must be <= max sequence length");
    if (pooled_frames() < 1) throw UsageError("pooling leaves no frames");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("dropout must be in [0,1)");
}

DetectorParams DetectorParams::zeros(const DetectorConfig& cfg) {
    DetectorParams p;
    const int e = cfg.embed_dim, f = cfg.conv_filters, k = cfg.kernel_width, h = cfg.hidden;
    p.embedding = Eigen::MatrixXd::Zero(cfg.vocab_size, e);
    p.conv_w = Eigen::MatrixXd::Zero(f, k * e);
    p.conv_b = Eigen::MatrixXd::Zero(f, 1);
    p.wz_in = Eigen::MatrixXd::Zero(h, f);
    p.wz_rec = Eigen::MatrixXd::Zero(h, h);
    p.bz = Eigen::MatrixXd::Zero(h, 1);
    p.wr_in = Eigen::MatrixXd::Zero(h, f);
    p.wr_rec = Eigen::MatrixXd::Zero(h, h);
    p.br = Eigen::MatrixXd::Zero(h, 1);
    p.wh_in = Eigen::MatrixXd::Zero(h, f);
    p.wh_rec = Eigen::MatrixXd::Zero(h, h);
    p.bh = Eigen::MatrixXd::Zero(h, 1);
    p.out_w = Eigen::MatrixXd::Zero(h, 1);
    p.out_b = Eigen::MatrixXd::Zero(1, 1);
    return p;
}

DetectorParams DetectorParams::init(const DetectorConfig& cfg, std::uint64_t seed) {
    DetectorParams p = zeros(cfg);
    Rng rng(seed);
    const auto uniform = [&](Eigen::MatrixXd& m, double s) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                m(r, c) = (2.0 * rng.next_double() - 1.0) * s;
    };
    const auto glorot = [&](Eigen::MatrixXd& m) {
        uniform(m, std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols())));
    };
    uniform(p.embedding, 0.05);
    glorot(p.conv_w);
    glorot(p.wz_in);
    glorot(p.wz_rec);
    glorot(p.wr_in);
    glorot(p.wr_rec);
    glorot(p.wh_in);
    glorot(p.wh_rec);
    glorot(p.out_w);
    return p;
}

std::vector<Eigen::MatrixXd*> DetectorParams::tensors() {
    return {&embedding, &conv_w, &conv_b, &wz_in, &wz_rec, &bz,
            &wr_in, &wr_rec, &br, &wh_in, &wh_rec, &bh, &out_w, &out_b};
}

std::vector<const Eigen::MatrixXd*> DetectorParams::tensors() const {
    return {&embedding, &conv_w, &conv_b, &wz_in, &wz_rec, &bz,
            &wr_in, &wr_rec, &br, &wh_in, &wh_rec, &bh, &out_w, &out_b};
}

const std::vector<std::string>& DetectorParams::names() {
    static const std::vector<std::string> n = {
        "embedding", "conv_w", "conv_b", "wz_in", "wz_rec", "bz",
        "wr_in", "wr_rec", "br", "wh_in", "wh_rec", "bh", "out_w", "out_b"};
    return n;
}

bool DetectorParams::all_finite() const {
    for (const auto* t : tensors())
        if (!t->allFinite()) return false;
    return true;
}

DetectorModel::DetectorModel(const DetectorConfig& cfg, const Vocabulary& vocab, std::uint64_t seed)
    : cfg_(cfg), vocab_(vocab) {
    cfg_.vocab_size = vocab.size();
    cfg_.validate();
    params_ = DetectorParams::init(cfg_, seed);
    adam_m_ = DetectorParams::zeros(cfg_);
    adam_v_ = DetectorParams::zeros(cfg_);
}

std::vector<std::int32_t> DetectorModel::encode(const std::string& text) const {
    auto ids = vocab_.encode(tokenize(text));
    ids.resize(static_cast<std::size_t>(cfg_.max_len), Vocabulary::kPad);
    return ids;
}

double DetectorModel::forward(const std::vector<std::int32_t>& token_ids, bool train_mode,
                              std::uint64_t seed, ForwardCache* cache) const {
    const int L = cfg_.max_len, E = cfg_.embed_dim, F = cfg_.conv_filters;
    const int K = cfg_.kernel_width, P = cfg_.pool_width, H = cfg_.hidden;
    const int T1 = cfg_.conv_frames(), T2 = cfg_.pooled_frames();

    std::vector<std::int32_t> ids = token_ids;
    ids.resize(static_cast<std::size_t>(L), Vocabulary::kPad);
    for (auto id : ids)
        if (id < 0 || id >= cfg_.vocab_size) throw TokenIdOutOfRangeError(id, cfg_.vocab_size);

    // embedding + inverted dropout
    Eigen::MatrixXd x(L, E);
    for (int l = 0; l < L; ++l) x.row(l) = params_.embedding.row(ids[static_cast<std::size_t>(l)]);

    Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(L, E);
    if (train_mode && cfg_.dropout > 0.0) {
        Rng rng(seed);
        const double keep = 1.0 - cfg_.dropout;
        for (int l = 0; l < L; ++l)
            for (int e = 0; e < E; ++e)
                mask(l, e) = rng.next_double() < keep ? 1.0 / keep : 0.0;
        x = x.cwiseProduct(mask);
    }

    // valid 1D convolution via im2col, then ReLU
    Eigen::MatrixXd phi(T1, K * E);
    for (int t = 0; t < T1; ++t)
        for (int k = 0; k < K; ++k)
            phi.block(t, k * E, 1, E) = x.row(t + k);
    Eigen::MatrixXd conv_pre = phi * params_.conv_w.transpose();
    conv_pre.rowwise() += params_.conv_b.col(0).transpose();
    Eigen::MatrixXd conv_post = conv_pre.cwiseMax(0.0);

    // non-overlapping max pool over time
    Eigen::MatrixXd pooled(T2, F);
    Eigen::MatrixXi pool_argmax(T2, F);
    for (int t = 0; t < T2; ++t) {
        for (int f = 0; f < F; ++f) {
            int best = t * P;
            double bv = conv_post(best, f);
            for (int o = 1; o < P; ++o) {
                if (conv_post(t * P + o, f) > bv) {
                    best = t * P + o;
                    bv = conv_post(best, f);
                }
            }
            pooled(t, f) = bv;
            pool_argmax(t, f) = best;
        }
    }

    // GRU: z update gate, r reset gate, c candidate state
    Eigen::MatrixXd gz(H, T2), gr(H, T2), gc(H, T2), gh(H, T2);
    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(H);
    for (int t = 0; t < T2; ++t) {
        const Eigen::VectorXd xt = pooled.row(t).transpose();
        const Eigen::VectorXd z =
            (params_.wz_in * xt + params_.wz_rec * h_prev + params_.bz.col(0)).unaryExpr([](double v) {
                return 1.0 / (1.0 + std::exp(-v));
            });
        const Eigen::VectorXd r =
            (params_.wr_in * xt + params_.wr_rec * h_prev + params_.br.col(0)).unaryExpr([](double v) {
                return 1.0 / (1.0 + std::exp(-v));
            });
        const Eigen::VectorXd c =
            (params_.wh_in * xt + params_.wh_rec * (r.cwiseProduct(h_prev)) + params_.bh.col(0))
                .array()
                .tanh();
        const Eigen::VectorXd h = (1.0 - z.array()).matrix().cwiseProduct(h_prev) + z.cwiseProduct(c);
        gz.col(t) = z;
        gr.col(t) = r;
        gc.col(t) = c;
        gh.col(t) = h;
        h_prev = h;
    }

    // global max pool over time, affine head
    Eigen::VectorXd global(H);
    Eigen::VectorXi global_argmax(H);
    for (int u = 0; u < H; ++u) {
        int best = 0;
        double bv = gh(u, 0);
        for (int t = 1; t < T2; ++t) {
            if (gh(u, t) > bv) {
                bv = gh(u, t);
                best = t;
            }
        }
        global(u) = bv;
        global_argmax(u) = best;
    }
    const double logit = params_.out_w.col(0).dot(global) + params_.out_b(0, 0);
    const double prob = sigmoid(logit);

    if (cache) {
        cache->ids = std::move(ids);
        cache->embedded = std::move(x);
        cache->dropout_mask = std::move(mask);
        cache->conv_pre = std::move(conv_pre);
        cache->pooled = std::move(pooled);
        cache->pool_argmax = std::move(pool_argmax);
        cache->gru_z = std::move(gz);
        cache->gru_r = std::move(gr);
        cache->gru_c = std::move(gc);
        cache->gru_h = std::move(gh);
        cache->global_argmax = std::move(global_argmax);
        cache->global_out = std::move(global);
        cache->logit = logit;
        cache->prob = prob;
    }
    return prob;
}

void DetectorModel::backward(const ForwardCache& cache, double dlogit, DetectorParams& grads) const {
    const int E = cfg_.embed_dim, F = cfg_.conv_filters;
    const int K = cfg_.kernel_width, P = cfg_.pool_width, H = cfg_.hidden;
    const int T1 = cfg_.conv_frames(), T2 = cfg_.pooled_frames();

    // head
    grads.out_w.col(0) += dlogit * cache.global_out;
    grads.out_b(0, 0) += dlogit;

    // global max pool scatters into per-step state grads
    Eigen::MatrixXd dh_acc = Eigen::MatrixXd::Zero(H, T2);
    for (int u = 0; u < H; ++u)
        dh_acc(u, cache.global_argmax(u)) += dlogit * params_.out_w(u, 0);

    // GRU backward through time
    Eigen::MatrixXd dx_pooled = Eigen::MatrixXd::Zero(T2, F);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
    for (int t = T2 - 1; t >= 0; --t) {
        const Eigen::VectorXd dh = dh_acc.col(t) + dh_next;
        const Eigen::VectorXd z = cache.gru_z.col(t);
        const Eigen::VectorXd r = cache.gru_r.col(t);
        const Eigen::VectorXd c = cache.gru_c.col(t);
        const Eigen::VectorXd h_prev =
            t > 0 ? Eigen::VectorXd(cache.gru_h.col(t - 1)) : Eigen::VectorXd(Eigen::VectorXd::Zero(H));
        const Eigen::VectorXd xt = cache.pooled.row(t).transpose();

        const Eigen::VectorXd dc = dh.cwiseProduct(z);
        const Eigen::VectorXd dc_raw = dc.cwiseProduct((1.0 - c.array().square()).matrix());
        const Eigen::VectorXd dz = dh.cwiseProduct(c - h_prev);
        const Eigen::VectorXd dz_raw = dz.cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));
        const Eigen::VectorXd drh = params_.wh_rec.transpose() * dc_raw;  // d(r . h_prev)
        const Eigen::VectorXd dr = drh.cwiseProduct(h_prev);
        const Eigen::VectorXd dr_raw = dr.cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));

        grads.wz_in += dz_raw * xt.transpose();
        grads.wz_rec += dz_raw * h_prev.transpose();
        grads.bz.col(0) += dz_raw;
        grads.wr_in += dr_raw * xt.transpose();
        grads.wr_rec += dr_raw * h_prev.transpose();
        grads.br.col(0) += dr_raw;
        grads.wh_in += dc_raw * xt.transpose();
        grads.wh_rec += dc_raw * (r.cwiseProduct(h_prev)).transpose();
        grads.bh.col(0) += dc_raw;

        dx_pooled.row(t) = (params_.wz_in.transpose() * dz_raw + params_.wr_in.transpose() * dr_raw +
                            params_.wh_in.transpose() * dc_raw)
                               .transpose();

        dh_next = dh.cwiseProduct((1.0 - z.array()).matrix()) + drh.cwiseProduct(r) +
                  params_.wz_rec.transpose() * dz_raw + params_.wr_rec.transpose() * dr_raw;
    }

    // max pool -> ReLU -> conv
    Eigen::MatrixXd dconv_post = Eigen::MatrixXd::Zero(T1, F);
    for (int t = 0; t < T2; ++t)
        for (int f = 0; f < F; ++f)
            dconv_post(cache.pool_argmax(t, f), f) += dx_pooled(t, f);

    const Eigen::MatrixXd relu_gate =
        (cache.conv_pre.array() > 0.0).cast<double>();
    const Eigen::MatrixXd dconv_pre = dconv_post.cwiseProduct(relu_gate);

    Eigen::MatrixXd phi(T1, K * E);
    for (int t = 0; t < T1; ++t)
        for (int k = 0; k < K; ++k)
            phi.block(t, k * E, 1, E) = cache.embedded.row(t + k);

    grads.conv_w += dconv_pre.transpose() * phi;
    grads.conv_b.col(0) += dconv_pre.colwise().sum().transpose();

    const Eigen::MatrixXd dphi = dconv_pre * params_.conv_w;  // T1 x K*E
    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(cfg_.max_len, E);
    for (int t = 0; t < T1; ++t)
        for (int k = 0; k < K; ++k)
            dx.row(t + k) += dphi.block(t, k * E, 1, E);

    // dropout, then scatter into embedding rows
    dx = dx.cwiseProduct(cache.dropout_mask);
    for (int l = 0; l < cfg_.max_len; ++l)
        grads.embedding.row(cache.ids[static_cast<std::size_t>(l)]) += dx.row(l);
}

void DetectorModel::adam_step(const DetectorParams& grads, const TrainConfig& tcfg) {
    ++adam_step_;
    const double b1 = tcfg.beta1, b2 = tcfg.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_step_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_step_));

    auto ps = params_.tensors();
    auto gs = grads.tensors();
    auto ms = adam_m_.tensors();
    auto vs = adam_v_.tensors();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        *ms[i] = b1 * *ms[i] + (1.0 - b1) * *gs[i];
        *vs[i] = b2 * *vs[i] + (1.0 - b2) * gs[i]->cwiseProduct(*gs[i]);
        const Eigen::MatrixXd m_hat = *ms[i] / bc1;
        const Eigen::MatrixXd v_hat = *vs[i] / bc2;
        *ps[i] -=
            tcfg.learning_rate *
            m_hat.cwiseQuotient((v_hat.cwiseSqrt().array() + tcfg.epsilon).matrix());
    }
    if (!params_.all_finite()) throw Error("detector parameters became non-finite");
}

Prediction DetectorModel::classify(const std::vector<std::int32_t>& token_ids, double tau) const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("tau must be in [0,1]");
    Prediction pred;
    pred.posterior = forward(token_ids, false, 0);
    pred.tau = tau;
    pred.label = pred.posterior > tau ? Label::hate : Label::non_hate;
    return pred;
}

double DetectorModel::predict_text(const std::string& text, bool) const {
    return forward(encode(text), false, 0);
}

double bce_loss(double prob, double target) {
    const double p = std::clamp(prob, 1e-12, 1.0 - 1e-12);
    return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

double evaluate_loss(const DetectorModel& m, const std::vector<std::vector<std::int32_t>>& ids,
                     const std::vector<double>& targets) {
    double loss = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i)
        loss += bce_loss(m.forward(ids[i], false, 0), targets[i]);
    return loss / static_cast<double>(ids.size());
}

TrainedDetector train_detector(const Dataset& train, const Vocabulary& vocab,
                               const DetectorConfig& dcfg, const TrainConfig& tcfg) {
    assert_train_side(train, "train_detector");
    if (train.count(Label::hate) == 0 || train.count(Label::non_hate) == 0)
        throw SingleClassCorpusError("train_detector: corpus must contain both classes");
    if (tcfg.batch_size < 1 || tcfg.patience < 1 || tcfg.max_epochs < 1)
        throw UsageError("train config: batch size, patience and max epochs must be >= 1");

    DetectorConfig cfg = dcfg;
    cfg.vocab_size = vocab.size();
    cfg.validate();

    DetectorModel model(cfg, vocab, mix64(tcfg.seed, 0xD1));

    std::vector<std::vector<std::int32_t>> ids;
    std::vector<double> targets;
    ids.reserve(train.size());
    targets.reserve(train.size());
    for (const auto& e : train.examples) {
        ids.push_back(model.encode(e.text));
        targets.push_back(e.label == Label::hate ? 1.0 : 0.0);
    }

    // seed-keyed validation slice
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng val_rng(mix64(tcfg.seed, 0xD2));
    val_rng.shuffle(order);
    const auto n_val = static_cast<std::size_t>(tcfg.val_fraction * static_cast<double>(ids.size()));
    std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());

    std::vector<std::vector<std::int32_t>> val_ids;
    std::vector<double> val_targets;
    for (auto i : val_idx) {
        val_ids.push_back(ids[i]);
        val_targets.push_back(targets[i]);
    }

    TrainingHistory history;
    DetectorParams best = model.params();
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    Rng epoch_rng(mix64(tcfg.seed, 0xD3));
    std::uint64_t dropout_counter = 0;
    DetectorParams grads = DetectorParams::zeros(cfg);
    ForwardCache cache;

    for (int epoch = 0; epoch < tcfg.max_epochs; ++epoch) {
        epoch_rng.shuffle(train_idx);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < train_idx.size();
             start += static_cast<std::size_t>(tcfg.batch_size)) {
            const std::size_t end =
                std::min(train_idx.size(), start + static_cast<std::size_t>(tcfg.batch_size));
            for (auto* g : grads.tensors()) g->setZero();
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t idx = train_idx[i];
                const double p = model.forward(ids[idx], true, mix64(tcfg.seed, 0xD40000 + dropout_counter++),
                                               &cache);
                epoch_loss += bce_loss(p, targets[idx]);
                model.backward(cache, (p - targets[idx]) / static_cast<double>(end - start), grads);
            }
            seen += end - start;
            model.adam_step(grads, tcfg);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / static_cast<double>(seen);
        stats.val_loss = val_ids.empty() ? 0.0 : evaluate_loss(model, val_ids, val_targets);
        history.epochs.push_back(stats);
        history.stopped_epoch = epoch;

        if (!val_ids.empty()) {
            if (stats.val_loss < best_val) {
                best_val = stats.val_loss;
                best = model.params();
                history.best_epoch = epoch;
                since_best = 0;
            } else if (++since_best >= tcfg.patience) {
                history.early_stopped = true;
                break;
            }
        }
    }

    if (history.best_epoch >= 0) model.params() = best;
    return {std::move(model), std::move(history)};
}

void save_history_csv(const TrainingHistory& h, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    os << "epoch,train_loss,val_loss\n";
    char buf[96];
    for (const auto& e : h.epochs) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f\n", e.epoch, e.train_loss, e.val_loss);
        os << buf;
    }
}

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_i64(std::ostream& os, std::int64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(static_cast<std::uint64_t>(v) >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::int64_t read_i64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return static_cast<std::int64_t>(v);
}

void write_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_i64(os, static_cast<std::int64_t>(bits));
}

double read_f64(std::istream& is) {
    const auto bits = static_cast<std::uint64_t>(read_i64(is));
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    write_i64(os, m.rows());
    write_i64(os, m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) write_f64(os, m(r, c));
}

Eigen::MatrixXd read_matrix(std::istream& is) {
    const auto rows = read_i64(is);
    const auto cols = read_i64(is);
    if (rows < 0 || cols < 0) throw IoError("bad tensor shape in checkpoint");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = read_f64(is);
    return m;
}

}  // namespace

void DetectorModel::save(std::ostream& os) const {
    os.write(kMagic, 8);
    write_u32(os, kVersion);
    write_i64(os, cfg_.embed_dim);
    write_f64(os, cfg_.dropout);
    write_i64(os, cfg_.conv_filters);
    write_i64(os, cfg_.kernel_width);
    write_i64(os, cfg_.pool_width);
    write_i64(os, cfg_.hidden);
    write_i64(os, cfg_.max_len);
    write_i64(os, cfg_.vocab_size);

    std::ostringstream vocab_text;
    vocab_.save(vocab_text);
    const std::string vt = vocab_text.str();
    write_i64(os, static_cast<std::int64_t>(vt.size()));
    os.write(vt.data(), static_cast<std::streamsize>(vt.size()));

    write_i64(os, adam_step_);
    for (const auto* t : params_.tensors()) write_matrix(os, *t);
    for (const auto* t : adam_m_.tensors()) write_matrix(os, *t);
    for (const auto* t : adam_v_.tensors()) write_matrix(os, *t);
}

DetectorModel DetectorModel::load(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw IoError("bad detector checkpoint magic");
    if (read_u32(is) != kVersion) throw IoError("unsupported detector checkpoint version");

    DetectorModel m;
    m.cfg_.embed_dim = static_cast<int>(read_i64(is));
    m.cfg_.dropout = read_f64(is);
    m.cfg_.conv_filters = static_cast<int>(read_i64(is));
    m.cfg_.kernel_width = static_cast<int>(read_i64(is));
    m.cfg_.pool_width = static_cast<int>(read_i64(is));
    m.cfg_.hidden = static_cast<int>(read_i64(is));
    m.cfg_.max_len = static_cast<int>(read_i64(is));
    m.cfg_.vocab_size = static_cast<int>(read_i64(is));

    const auto vt_size = read_i64(is);
    if (vt_size < 0) throw IoError("bad checkpoint vocabulary size");
    std::string vt(static_cast<std::size_t>(vt_size), '\0');
    is.read(vt.data(), vt_size);
    std::istringstream vis(vt);
    m.vocab_ = Vocabulary::load(vis);

    m.adam_step_ = read_i64(is);
    for (auto* t : m.params_.tensors()) *t = read_matrix(is);
    for (auto* t : m.adam_m_.tensors()) *t = read_matrix(is);
    for (auto* t : m.adam_v_.tensors()) *t = read_matrix(is);
    if (!is) throw IoError("truncated detector checkpoint");
    m.cfg_.validate();
    return m;
}

void DetectorModel::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path);
    save(os);
    if (!os) throw IoError("failed writing " + path);
}

DetectorModel DetectorModel::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);
    return load(is);
}

}  // namespace genaug
