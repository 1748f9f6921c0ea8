#pragma once

#include "seqtag/evaluation.hpp"
#include "seqtag/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqtag {

// Per-tensor squared-gradient accumulators, parallel to a fixed ref list.
struct AdagradState {
    double lr = 0.02;
    double eps = 1e-8;
    std::vector<Vector> accum;
};

AdagradState make_adagrad(const std::vector<TensorRef>& refs, double lr, double eps = 1e-8);

// G += g*g; theta -= lr * g / sqrt(G + eps), over the whole tensor.
void adagrad_step(AdagradState& state, std::size_t tensor_idx, const TensorRef& ref,
                  const double* grad);
// Same update restricted to one matrix column (sparse embedding path).
void adagrad_step_col(AdagradState& state, std::size_t tensor_idx, const TensorRef& ref,
                      std::size_t col, const Vector& grad_col);

struct TrainConfig {
    int epochs = 50;
    std::uint64_t seed = 1;
    double lr = 0.02;
    double adagrad_eps = 1e-8;
    bool shuffle = true;
    double clip_norm = 5.0; // global norm over the applied gradient set; 0 disables
    int patience = 5;       // epochs without dev-F1 improvement before stopping; 0 disables
    ModelOptions model;
};

struct EpochRow {
    int epoch = 0;
    double mean_nll = 0.0;
    double dev_p = 0.0, dev_r = 0.0, dev_f1 = 0.0;
};

struct TrainReport {
    std::vector<EpochRow> rows;
    int best_epoch = 0; // 1-based; earliest epoch achieving the best dev F1
    double best_f1 = 0.0;
    double wall_seconds = 0.0; // console only, never serialized
};

struct TrainResult {
    Model model; // best-dev checkpoint
    TrainReport report;
};

TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const TagSet& tagset,
                  const Vocabulary& words, const Vocabulary& chars, const TrainConfig& cfg);

// Identity when shuffle is off, otherwise a Fisher-Yates permutation.
std::vector<std::size_t> visit_order(std::size_t n, bool shuffle, Rng& rng);

// epoch / loss / dev P,R,F1 rows as line-delimited text (plot-friendly).
void write_report(const std::string& path, const TrainReport& report);

SpanSet gold_span_set(const Corpus& corpus, const TagSet& tagset);
EvalResult evaluate_model(const Model& model, const Corpus& corpus, const TagOptions& opts = {});

// ---- finite-difference gradient checking ----

struct GradCheckConfig {
    bool crf_only = false; // emissions become free parameters, no encoder
    Architecture arch = Architecture::BiLSTM;
    FeatureRegime regime = FeatureRegime::WE_CE;
    int n_hidden = 4;
    int n_tags = 3;
    int sentence_len = 4;
    ModelDims dims{3, 4, 3, 3}; // deliberately tiny
    int n_words = 6;
    int n_chars = 8;
    std::uint64_t seed = 12345;
    double tolerance = 1e-4;
    double fd_step = 1e-5; // central differences
    std::size_t entries_per_tensor = 50;
    std::string corrupt_tensor; // harness-sanity hook: breaks one analytic gradient
};

struct GradCheckRow {
    std::string tensor;
    double max_rel_err = 0.0;
    std::size_t checked = 0;
    bool pass = true;
};

struct GradCheckReport {
    std::vector<GradCheckRow> rows;
    bool pass = true;
    double tolerance = 0.0;
    int resamples = 0; // char-CNN argmax near-ties hit during setup
};

GradCheckReport grad_check(const GradCheckConfig& cfg);

} // namespace seqtag
