#include "seqtag/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace seqtag {

AdagradState make_adagrad(const std::vector<TensorRef>& refs, double lr, double eps) {
    AdagradState st;
    st.lr = lr;
    st.eps = eps;
    st.accum.reserve(refs.size());
    for (const auto& r : refs) st.accum.emplace_back(r.size, 0.0);
    return st;
}

void adagrad_step(AdagradState& state, std::size_t tensor_idx, const TensorRef& ref,
                  const double* grad) {
    Vector& G = state.accum.at(tensor_idx);
    if (G.size() != ref.size) shape_error("adagrad_step: accumulator does not match tensor " + ref.name);
    for (std::size_t i = 0; i < ref.size; ++i) {
        const double g = grad[i];
        if (g == 0.0) continue;
        G[i] += g * g;
        ref.data[i] -= state.lr * g / std::sqrt(G[i] + state.eps);
    }
}

void adagrad_step_col(AdagradState& state, std::size_t tensor_idx, const TensorRef& ref,
                      std::size_t col, const Vector& grad_col) {
    Vector& G = state.accum.at(tensor_idx);
    if (grad_col.size() != ref.rows || col >= ref.cols)
        shape_error("adagrad_step_col: bad column update for " + ref.name);
    for (std::size_t r = 0; r < ref.rows; ++r) {
        const double g = grad_col[r];
        if (g == 0.0) continue;
        const std::size_t i = r * ref.cols + col;
        G[i] += g * g;
        ref.data[i] -= state.lr * g / std::sqrt(G[i] + state.eps);
    }
}

std::vector<std::size_t> visit_order(std::size_t n, bool shuffle, Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    if (shuffle) {
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = rng.next_index(i);
            std::swap(order[i - 1], order[j]);
        }
    }
    return order;
}

SpanSet gold_span_set(const Corpus& corpus, const TagSet& tagset) {
    std::vector<std::vector<int>> rows;
    rows.reserve(corpus.size());
    for (const auto& s : corpus) rows.push_back(s.gold_tags);
    return corpus_spans(rows, tagset);
}

EvalResult evaluate_model(const Model& model, const Corpus& corpus, const TagOptions& opts) {
    std::vector<std::vector<int>> pred_rows;
    pred_rows.reserve(corpus.size());
    for (const auto& s : corpus) pred_rows.push_back(tag_sentence(model, s, opts));
    return evaluate(gold_span_set(corpus, model.tagset), corpus_spans(pred_rows, model.tagset),
                    model.tagset.classes.size());
}

namespace {

double grad_sq_norm(const SentenceGrads& g, EncoderParams& denc, bool include_words) {
    double acc = 0.0;
    auto add = [&acc](const double* d, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) acc += d[i] * d[i];
    };
    if (include_words)
        for (const auto& [id, col] : g.dword_cols) add(col.data(), col.size());
    for (const auto& [id, col] : g.dchar_cols) add(col.data(), col.size());
    add(g.dcnn_W.data(), g.dcnn_W.size());
    add(g.dcnn_b.data(), g.dcnn_b.size());
    for (const auto& r : param_refs(denc)) add(r.data, r.size);
    add(g.dtrans.data(), g.dtrans.size());
    return acc;
}

void scale_grads(SentenceGrads& g, EncoderParams& denc, double s) {
    auto mul = [s](double* d, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) d[i] *= s;
    };
    for (auto& [id, col] : g.dword_cols) mul(col.data(), col.size());
    for (auto& [id, col] : g.dchar_cols) mul(col.data(), col.size());
    mul(g.dcnn_W.data(), g.dcnn_W.size());
    mul(g.dcnn_b.data(), g.dcnn_b.size());
    for (auto& r : param_refs(denc)) mul(r.data, r.size);
    mul(g.dtrans.data(), g.dtrans.size());
}

struct RefIndex {
    std::vector<TensorRef> refs;
    int words = -1, chars = -1, cnn_w = -1, cnn_b = -1, trans = -1;
    std::size_t enc_begin = 0, enc_count = 0;
};

RefIndex index_refs(Model& model) {
    RefIndex idx;
    idx.refs = model.param_refs();
    for (std::size_t i = 0; i < idx.refs.size(); ++i) {
        const std::string& n = idx.refs[i].name;
        if (n == "emb.words") idx.words = static_cast<int>(i);
        else if (n == "emb.chars") idx.chars = static_cast<int>(i);
        else if (n == "cnn.W") idx.cnn_w = static_cast<int>(i);
        else if (n == "cnn.b") idx.cnn_b = static_cast<int>(i);
        else if (n == "crf.trans") idx.trans = static_cast<int>(i);
        else if (idx.enc_count++ == 0) idx.enc_begin = i;
    }
    return idx;
}

void apply_update(Model& model, AdagradState& ada, const RefIndex& idx, SentenceGrads& g,
                  const TrainConfig& cfg) {
    const bool update_words = model.uses_words() && model.words.trainable;
    if (cfg.clip_norm > 0.0) {
        const double norm = std::sqrt(grad_sq_norm(g, g.denc, update_words));
        if (norm > cfg.clip_norm) scale_grads(g, g.denc, cfg.clip_norm / norm);
    }

    if (update_words)
        for (const auto& [id, col] : g.dword_cols)
            adagrad_step_col(ada, static_cast<std::size_t>(idx.words),
                             idx.refs[static_cast<std::size_t>(idx.words)],
                             static_cast<std::size_t>(id), col);
    if (model.uses_chars()) {
        for (const auto& [id, col] : g.dchar_cols)
            adagrad_step_col(ada, static_cast<std::size_t>(idx.chars),
                             idx.refs[static_cast<std::size_t>(idx.chars)],
                             static_cast<std::size_t>(id), col);
        adagrad_step(ada, static_cast<std::size_t>(idx.cnn_w),
                     idx.refs[static_cast<std::size_t>(idx.cnn_w)], g.dcnn_W.data());
        adagrad_step(ada, static_cast<std::size_t>(idx.cnn_b),
                     idx.refs[static_cast<std::size_t>(idx.cnn_b)], g.dcnn_b.data());
    }
    const auto enc_grad_refs = param_refs(g.denc);
    for (std::size_t i = 0; i < enc_grad_refs.size(); ++i)
        adagrad_step(ada, idx.enc_begin + i, idx.refs[idx.enc_begin + i], enc_grad_refs[i].data);
    adagrad_step(ada, static_cast<std::size_t>(idx.trans),
                 idx.refs[static_cast<std::size_t>(idx.trans)], g.dtrans.data());
}

} // namespace

TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus, const TagSet& tagset,
                  const Vocabulary& words, const Vocabulary& chars, const TrainConfig& cfg) {
    if (train_corpus.empty()) throw std::runtime_error("train: empty training corpus");
    if (dev_corpus.empty()) throw std::runtime_error("train: empty dev corpus");
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("train: learning rate must be positive");

    const auto t_start = std::chrono::steady_clock::now();

    Corpus tr = train_corpus;
    Corpus dev = dev_corpus;
    assign_ids(tr, words, chars, cfg.model.word_norm);
    assign_ids(dev, words, chars, cfg.model.word_norm);

    TrainConfig cfg_local = cfg;
    cfg_local.model.n_hidden = cfg.model.n_hidden;
    Rng rng(cfg.seed);
    Model model = build_model(tagset, words, chars, cfg_local.model, rng);
    Rng shuffle_rng = rng.split();

    RefIndex idx = index_refs(model);
    AdagradState ada = make_adagrad(idx.refs, cfg.lr, cfg.adagrad_eps);

    TrainResult result;
    result.report.best_f1 = -1.0;
    Model best = model;

    int since_best = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto order = visit_order(tr.size(), cfg.shuffle, shuffle_rng);
        double total_loss = 0.0;
        for (const std::size_t si : order) {
            SentenceGrads g = sentence_loss_grads(model, tr[si]);
            if (!std::isfinite(g.loss))
                throw std::runtime_error("train: non-finite loss at sentence " +
                                         std::to_string(si) + " in epoch " + std::to_string(epoch));
            total_loss += g.loss;
            apply_update(model, ada, idx, g, cfg);
        }

        const EvalResult dev_eval = evaluate_model(model, dev);
        EpochRow row;
        row.epoch = epoch;
        row.mean_nll = total_loss / static_cast<double>(tr.size());
        row.dev_p = dev_eval.precision;
        row.dev_r = dev_eval.recall;
        row.dev_f1 = dev_eval.f1;
        result.report.rows.push_back(row);

        if (row.dev_f1 > result.report.best_f1) {
            result.report.best_f1 = row.dev_f1;
            result.report.best_epoch = epoch;
            best = model;
            since_best = 0;
        } else if (++since_best >= cfg.patience && cfg.patience > 0) {
            break;
        }
    }

    result.model = std::move(best);
    result.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

void write_report(const std::string& path, const TrainReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    char buf[160];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "epoch %d loss %.6f dev_p %.4f dev_r %.4f dev_f1 %.4f\n",
                      r.epoch, r.mean_nll, 100.0 * r.dev_p, 100.0 * r.dev_r, 100.0 * r.dev_f1);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "best_epoch %d best_f1 %.4f\n", report.best_epoch,
                  100.0 * report.best_f1);
    out << buf;
}

// ---- gradient checking ----

namespace {

struct Probe {
    Model model;
    std::vector<TaggedSentence> sentences;
};

// Random BIO-valid tag sequence over the tag set.
std::vector<int> random_valid_tags(std::size_t n, const TagSet& ts, Rng& rng) {
    std::vector<int> tags(n, ts.o_index());
    int prev_cls = -1;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_double();
        if (prev_cls >= 0 && u < 0.4) {
            tags[i] = ts.i_tag(prev_cls);
        } else if (u < 0.7 && !ts.classes.empty()) {
            const int cls = static_cast<int>(rng.next_index(ts.classes.size()));
            tags[i] = ts.b_tag(cls);
            prev_cls = cls;
            continue;
        } else {
            tags[i] = ts.o_index();
            prev_cls = -1;
            continue;
        }
        // I-tag keeps the class open
    }
    return tags;
}

Probe make_probe(const GradCheckConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    const int n_classes = std::max(1, (cfg.n_tags - 1) / 2);
    std::vector<std::string> class_names;
    for (int c = 0; c < n_classes; ++c) class_names.push_back("C" + std::to_string(c));
    const TagSet ts = TagSet::for_classes(class_names);

    Vocabulary words, chars;
    for (int i = 0; i < cfg.n_words; ++i) words.add("w" + std::to_string(i));
    for (int i = 0; i < cfg.n_chars; ++i) chars.add(std::string(1, static_cast<char>('a' + i)));

    ModelOptions mo;
    mo.arch = cfg.arch;
    mo.regime = cfg.regime;
    mo.n_hidden = cfg.n_hidden;
    mo.dims = cfg.dims;
    mo.word_init = WordInit::Random;

    Probe probe{build_model(ts, words, chars, mo, rng), {}};

    TaggedSentence s;
    for (int t = 0; t < cfg.sentence_len; ++t) {
        s.tokens.push_back("tok");
        s.word_ids.push_back(static_cast<int>(rng.next_index(words.size())));
        const std::size_t wlen = 1 + rng.next_index(4);
        std::vector<int> cid;
        for (std::size_t k = 0; k < wlen; ++k)
            cid.push_back(static_cast<int>(rng.next_index(chars.size())));
        s.char_ids.push_back(cid);
    }
    s.gold_tags = random_valid_tags(s.tokens.size(), ts, rng);
    probe.sentences.push_back(std::move(s));
    return probe;
}

double probe_loss(const Probe& probe) {
    double total = 0.0;
    for (const auto& s : probe.sentences) {
        const SentenceForward fwd = forward_sentence(probe.model, s);
        total += nll_and_gradients(fwd.enc.scores, s.gold_tags, probe.model.trans).loss;
    }
    return total;
}

// Smallest char-CNN pooling margin over all tokens; degenerate argmaxes make
// the central difference invalid.
double probe_min_margin(const Probe& probe) {
    if (!probe.model.uses_chars()) return 1.0;
    double m = 1.0;
    for (const auto& s : probe.sentences) {
        const SentenceForward fwd = forward_sentence(probe.model, s);
        for (const auto& tr : fwd.char_traces) m = std::min(m, tr.min_margin);
    }
    return m;
}

double rel_error(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    if (denom < 5e-6) return std::abs(a - b) < 1e-7 ? 0.0 : std::abs(a - b);
    return std::abs(a - b) / denom;
}

GradCheckReport check_crf_only(const GradCheckConfig& cfg) {
    Rng rng(cfg.seed);
    const std::size_t T = static_cast<std::size_t>(cfg.n_tags);
    const std::size_t n = static_cast<std::size_t>(cfg.sentence_len);
    std::vector<Vector> emissions(n);
    for (auto& e : emissions) e = rng.uniform_vec(T, -1.0, 1.0);
    Matrix trans = Matrix(T + 1, T);
    for (std::size_t i = 0; i < trans.size(); ++i) trans.data()[i] = rng.uniform(-1.0, 1.0);
    std::vector<int> gold(n);
    for (auto& t : gold) t = static_cast<int>(rng.next_index(T));

    const CrfNll analytic = nll_and_gradients(emissions, gold, trans);

    GradCheckReport report;
    report.tolerance = cfg.tolerance;
    const double h = cfg.fd_step;

    GradCheckRow erow{"crf.emissions", 0.0, 0, true};
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < T; ++j) {
            const double saved = emissions[t][j];
            emissions[t][j] = saved + h;
            const double lp = nll_and_gradients(emissions, gold, trans).loss;
            emissions[t][j] = saved - h;
            const double lm = nll_and_gradients(emissions, gold, trans).loss;
            emissions[t][j] = saved;
            erow.max_rel_err =
                std::max(erow.max_rel_err, rel_error(analytic.grad_emissions[t][j], (lp - lm) / (2 * h)));
            ++erow.checked;
        }
    erow.pass = erow.max_rel_err <= cfg.tolerance;
    report.rows.push_back(erow);

    GradCheckRow trow{"crf.trans", 0.0, 0, true};
    for (std::size_t i = 0; i < trans.size(); ++i) {
        const double saved = trans.data()[i];
        trans.data()[i] = saved + h;
        const double lp = nll_and_gradients(emissions, gold, trans).loss;
        trans.data()[i] = saved - h;
        const double lm = nll_and_gradients(emissions, gold, trans).loss;
        trans.data()[i] = saved;
        trow.max_rel_err =
            std::max(trow.max_rel_err, rel_error(analytic.grad_trans.data()[i], (lp - lm) / (2 * h)));
        ++trow.checked;
    }
    trow.pass = trow.max_rel_err <= cfg.tolerance;
    report.rows.push_back(trow);

    report.pass = erow.pass && trow.pass;
    return report;
}

} // namespace

GradCheckReport grad_check(const GradCheckConfig& cfg) {
    if (cfg.crf_only) return check_crf_only(cfg);

    GradCheckReport report;
    report.tolerance = cfg.tolerance;

    Probe probe = make_probe(cfg, cfg.seed);
    // resample while a pooling argmax is too close to call
    while (probe_min_margin(probe) < 1e-6) {
        ++report.resamples;
        if (report.resamples > 8)
            throw std::runtime_error("grad_check: could not find a non-degenerate probe point");
        probe = make_probe(cfg, cfg.seed + 1000ull * static_cast<std::uint64_t>(report.resamples));
    }

    // analytic gradients, densified per tensor
    std::vector<TensorRef> refs = probe.model.param_refs();
    std::vector<Vector> analytic(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) analytic[i].assign(refs[i].size, 0.0);

    for (const auto& s : probe.sentences) {
        SentenceGrads g = sentence_loss_grads(probe.model, s);
        std::size_t enc_i = 0;
        const auto enc_refs = param_refs(g.denc);
        for (std::size_t i = 0; i < refs.size(); ++i) {
            const std::string& name = refs[i].name;
            if (name == "emb.words") {
                for (const auto& [id, col] : g.dword_cols)
                    for (std::size_t r = 0; r < refs[i].rows; ++r)
                        analytic[i][r * refs[i].cols + static_cast<std::size_t>(id)] += col[r];
            } else if (name == "emb.chars") {
                for (const auto& [id, col] : g.dchar_cols)
                    for (std::size_t r = 0; r < refs[i].rows; ++r)
                        analytic[i][r * refs[i].cols + static_cast<std::size_t>(id)] += col[r];
            } else if (name == "cnn.W") {
                for (std::size_t k = 0; k < refs[i].size; ++k) analytic[i][k] += g.dcnn_W.data()[k];
            } else if (name == "cnn.b") {
                for (std::size_t k = 0; k < refs[i].size; ++k) analytic[i][k] += g.dcnn_b[k];
            } else if (name == "crf.trans") {
                for (std::size_t k = 0; k < refs[i].size; ++k) analytic[i][k] += g.dtrans.data()[k];
            } else {
                for (std::size_t k = 0; k < refs[i].size; ++k)
                    analytic[i][k] += enc_refs[enc_i].data[k];
                ++enc_i;
            }
        }
    }

    if (!cfg.corrupt_tensor.empty()) {
        for (std::size_t i = 0; i < refs.size(); ++i)
            if (refs[i].name == cfg.corrupt_tensor && refs[i].size > 0)
                analytic[i][0] += std::max(1.0, std::abs(analytic[i][0]));
    }

    Rng pick(cfg.seed ^ 0xABCDEF12345ull);
    const double h = cfg.fd_step;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        GradCheckRow row{refs[i].name, 0.0, 0, true};
        std::vector<std::size_t> entries;
        if (refs[i].size <= cfg.entries_per_tensor) {
            for (std::size_t k = 0; k < refs[i].size; ++k) entries.push_back(k);
        } else {
            std::set<std::size_t> chosen;
            while (chosen.size() < cfg.entries_per_tensor)
                chosen.insert(pick.next_index(refs[i].size));
            entries.assign(chosen.begin(), chosen.end());
        }
        for (const std::size_t k : entries) {
            double* slot = refs[i].data + k;
            const double saved = *slot;
            *slot = saved + h;
            const double lp = probe_loss(probe);
            *slot = saved - h;
            const double lm = probe_loss(probe);
            *slot = saved;
            row.max_rel_err = std::max(row.max_rel_err, rel_error(analytic[i][k], (lp - lm) / (2 * h)));
            ++row.checked;
        }
        row.pass = row.max_rel_err <= cfg.tolerance;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace seqtag
