#include "seqtag/model.hpp"

#include <stdexcept>

namespace seqtag {

WordInit word_init_from_name(const std::string& name) {
    if (name == "pretrained") return WordInit::Pretrained;
    if (name == "zeros") return WordInit::Zeros;
    if (name == "random") return WordInit::Random;
    throw std::invalid_argument("unknown word init mode: " + name);
}

const char* word_init_name(WordInit w) {
    switch (w) {
        case WordInit::Pretrained: return "pretrained";
        case WordInit::Zeros: return "zeros";
        case WordInit::Random: return "random";
    }
    return "?";
}

std::vector<TensorRef> Model::param_refs() {
    std::vector<TensorRef> out;
    if (uses_words()) out.push_back(ref_of("emb.words", words.M));
    if (uses_chars()) {
        out.push_back(ref_of("emb.chars", chars.M));
        out.push_back(ref_of("cnn.W", cnn.W));
        out.push_back(ref_of("cnn.b", cnn.b));
    }
    for (auto& r : seqtag::param_refs(encoder)) out.push_back(r);
    out.push_back(ref_of("crf.trans", trans));
    return out;
}

Model build_model(const TagSet& tagset, const Vocabulary& words, const Vocabulary& chars,
                  const ModelOptions& opts, Rng& rng) {
    Model m;
    m.tagset = tagset;
    m.word_vocab = words;
    m.char_vocab = chars;
    m.regime = opts.regime;
    m.word_norm = opts.word_norm;
    m.dims = opts.dims;
    if (opts.dims.char_window % 2 == 0)
        throw std::invalid_argument("character CNN window must be odd");
    if (opts.nn_window % 2 == 0) throw std::invalid_argument("window size must be odd");
    m.enc_config.arch = opts.arch;
    m.enc_config.n_in = m.input_dim();
    m.enc_config.n_hidden = opts.n_hidden;
    m.enc_config.n_out = static_cast<int>(tagset.size());
    m.enc_config.window = opts.nn_window;
    m.enc_config.rnn_bias = opts.rnn_bias;

    if (m.uses_words()) {
        switch (opts.word_init) {
            case WordInit::Pretrained:
                if (opts.vectors_path.empty())
                    throw std::runtime_error("pretrained word init requires a vector file");
                m.words = load_pretrained(opts.vectors_path, words, opts.dims.d_we, rng,
                                          {opts.rare_token, 0.01});
                break;
            case WordInit::Zeros:
                m.words.M = Matrix(static_cast<std::size_t>(opts.dims.d_we), words.size(), 0.0);
                break;
            case WordInit::Random:
                m.words.M = scaled_uniform_matrix(static_cast<std::size_t>(opts.dims.d_we),
                                                  words.size(), rng);
                break;
        }
        m.words.trainable = opts.update_word_vectors;
    }

    if (m.uses_chars()) {
        m.chars.M =
            scaled_uniform_matrix(static_cast<std::size_t>(opts.dims.d_chr), chars.size(), rng);
        m.cnn.window = opts.dims.char_window;
        m.cnn.W = scaled_uniform_matrix(
            static_cast<std::size_t>(opts.dims.d_ce),
            static_cast<std::size_t>(opts.dims.d_chr) * opts.dims.char_window, rng);
        m.cnn.b = Vector(static_cast<std::size_t>(opts.dims.d_ce), 0.0);
    }

    m.encoder = init_params(m.enc_config, rng);
    m.trans = make_transitions(tagset.size());
    return m;
}

SentenceForward forward_sentence(const Model& model, const TaggedSentence& sentence) {
    if (sentence.tokens.empty()) throw std::invalid_argument("forward_sentence: empty sentence");
    if (sentence.word_ids.size() != sentence.tokens.size() ||
        sentence.char_ids.size() != sentence.tokens.size())
        throw std::invalid_argument("forward_sentence: sentence has no assigned ids");

    SentenceForward fwd;
    const std::size_t n = sentence.tokens.size();
    fwd.features.resize(n);
    if (model.uses_chars()) fwd.char_traces.resize(n);

    for (std::size_t t = 0; t < n; ++t) {
        Vector w, y;
        if (model.uses_words()) w = lookup_word(model.words, sentence.word_ids[t]);
        if (model.uses_chars()) {
            auto [vec, trace] = char_embed(model.cnn, model.chars, sentence.char_ids[t]);
            y = std::move(vec);
            fwd.char_traces[t] = std::move(trace);
        }
        fwd.features[t] = token_features(model.regime, model.uses_words() ? &w : nullptr,
                                         model.uses_chars() ? &y : nullptr);
    }
    fwd.enc = forward(model.encoder, model.enc_config, fwd.features);
    return fwd;
}

SentenceGrads sentence_loss_grads(const Model& model, const TaggedSentence& sentence) {
    const SentenceForward fwd = forward_sentence(model, sentence);
    const CrfNll nll = nll_and_gradients(fwd.enc.scores, sentence.gold_tags, model.trans);
    const EncoderBackward enc_back =
        backward(model.encoder, model.enc_config, fwd.enc.trace, nll.grad_emissions);

    SentenceGrads g;
    g.loss = nll.loss;
    g.dtrans = nll.grad_trans;
    g.denc = enc_back.grads;
    if (model.uses_chars()) {
        g.dcnn_W = Matrix(model.cnn.W.rows(), model.cnn.W.cols());
        g.dcnn_b = Vector(model.cnn.b.size(), 0.0);
    }

    const int d_we = model.dims.d_we;
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
        const Vector& dx = enc_back.dx[t];
        Vector dy;
        if (model.regime == FeatureRegime::CE) {
            dy = dx;
        } else if (model.regime == FeatureRegime::WE) {
            auto [it, ins] = g.dword_cols.try_emplace(sentence.word_ids[t],
                                                      Vector(static_cast<std::size_t>(d_we), 0.0));
            for (int j = 0; j < d_we; ++j) it->second[j] += dx[j];
        } else {
            auto [it, ins] = g.dword_cols.try_emplace(sentence.word_ids[t],
                                                      Vector(static_cast<std::size_t>(d_we), 0.0));
            for (int j = 0; j < d_we; ++j) it->second[j] += dx[j];
            dy.assign(dx.begin() + d_we, dx.end());
        }
        if (model.uses_chars()) {
            const CharCnnGrads cg =
                backprop_char_embed(model.cnn, model.chars, fwd.char_traces[t], dy);
            for (std::size_t i = 0; i < g.dcnn_W.size(); ++i)
                g.dcnn_W.data()[i] += cg.dW.data()[i];
            vadd_inplace(g.dcnn_b, cg.db);
            for (const auto& [id, col] : cg.dchar_cols) {
                auto [it, ins] = g.dchar_cols.try_emplace(id, Vector(col.size(), 0.0));
                vadd_inplace(it->second, col);
            }
        }
    }
    return g;
}

Matrix bio_constrained(const Matrix& trans, const TagSet& tagset) {
    Matrix out = trans;
    const double forbidden = -1e6;
    for (std::size_t j = 0; j < out.cols(); ++j) {
        const int tj = static_cast<int>(j);
        if (!tagset.is_i(tj)) continue;
        const int cls = tagset.class_of(tj);
        for (std::size_t k = 0; k < out.rows(); ++k) {
            const bool from_start = k == start_row(out);
            const int tk = static_cast<int>(k);
            const bool legal = !from_start && tk != tagset.o_index() &&
                               tagset.class_of(tk) == cls;
            if (!legal) out(k, j) = forbidden;
        }
    }
    return out;
}

std::vector<int> tag_sentence(const Model& model, const TaggedSentence& sentence,
                              const TagOptions& opts) {
    const SentenceForward fwd = forward_sentence(model, sentence);
    const Matrix* trans = &model.trans;
    Matrix constrained;
    if (opts.constrain_bio) {
        constrained = bio_constrained(model.trans, model.tagset);
        trans = &constrained;
    }
    return viterbi(fwd.enc.scores, *trans).tags;
}

} // namespace seqtag
