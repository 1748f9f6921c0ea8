#pragma once

#include "seqtag/crf.hpp"
#include "seqtag/data.hpp"
#include "seqtag/embeddings.hpp"
#include "seqtag/encoders.hpp"

#include <map>
#include <string>
#include <vector>

namespace seqtag {

struct ModelDims {
    int d_we = 50;
    int d_chr = 100;
    int d_ce = 25;
    int char_window = 3;
};

// Full tagging model: embedding tables, character CNN, encoder, transitions.
struct Model {
    TagSet tagset;
    Vocabulary word_vocab;
    Vocabulary char_vocab;
    FeatureRegime regime = FeatureRegime::WE_CE;
    WordNorm word_norm = WordNorm::LowerDigits;
    ModelDims dims;
    EncoderConfig enc_config;

    WordEmbeddingTable words;
    CharEmbeddingTable chars;
    CharCnn cnn;
    EncoderParams encoder;
    Matrix trans;

    int input_dim() const { return regime_input_dim(regime, dims.d_we, dims.d_ce); }
    bool uses_words() const { return regime != FeatureRegime::CE; }
    bool uses_chars() const { return regime != FeatureRegime::WE; }

    // Every trainable tensor in a fixed, documented order.
    std::vector<TensorRef> param_refs();
};

enum class WordInit { Pretrained, Zeros, Random };
WordInit word_init_from_name(const std::string& name);
const char* word_init_name(WordInit w);

struct ModelOptions {
    Architecture arch = Architecture::BiLSTM;
    FeatureRegime regime = FeatureRegime::WE_CE;
    int n_hidden = 100;
    ModelDims dims;
    int nn_window = 5;
    bool rnn_bias = true;
    WordInit word_init = WordInit::Random;
    std::string vectors_path;     // required for WordInit::Pretrained
    std::string rare_token = "<RARE>";
    bool update_word_vectors = true;
    WordNorm word_norm = WordNorm::LowerDigits;
};

Model build_model(const TagSet& tagset, const Vocabulary& words, const Vocabulary& chars,
                  const ModelOptions& opts, Rng& rng);

// Forward through embeddings and encoder; emissions feed the CRF.
struct SentenceForward {
    std::vector<Vector> features;
    std::vector<CharCnnTrace> char_traces; // empty when regime is WE
    EncoderForward enc;
};

SentenceForward forward_sentence(const Model& model, const TaggedSentence& sentence);

// Gradients of one sentence's loss for every trainable tensor. Embedding
// tables accumulate sparsely, keyed by column.
struct SentenceGrads {
    std::map<int, Vector> dword_cols;
    std::map<int, Vector> dchar_cols;
    Matrix dcnn_W;
    Vector dcnn_b;
    EncoderParams denc;
    Matrix dtrans;
    double loss = 0.0;
};

SentenceGrads sentence_loss_grads(const Model& model, const TaggedSentence& sentence);

struct TagOptions {
    bool constrain_bio = false; // forbid invalid BIO transitions at decode time
};

std::vector<int> tag_sentence(const Model& model, const TaggedSentence& sentence,
                              const TagOptions& opts = {});

// Decode-time transition copy with illegal BIO moves pushed to -1e6.
Matrix bio_constrained(const Matrix& trans, const TagSet& tagset);

} // namespace seqtag
