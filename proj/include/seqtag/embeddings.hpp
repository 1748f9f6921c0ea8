#pragma once

#include "seqtag/data.hpp"
#include "seqtag/tensor.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace seqtag {

struct WordEmbeddingTable {
    Matrix M; // d_we x |V|, one column per word
    bool trainable = true;
    int dim() const { return static_cast<int>(M.rows()); }
};

struct CharEmbeddingTable {
    Matrix M; // d_chr x |C|
    int dim() const { return static_cast<int>(M.rows()); }
};

// Convolution filter over character windows with per-unit max pooling.
struct CharCnn {
    Matrix W;       // d_ce x (d_chr * window)
    Vector b;       // d_ce
    int window = 3; // odd
    int out_dim() const { return static_cast<int>(W.rows()); }
};

// Per-call forward record: which window won each output unit, plus the padded
// character ids it was computed from. Required by backprop_char_embed.
struct CharCnnTrace {
    std::vector<int> padded_ids;
    std::vector<int> argmax;  // one winning window index per output unit
    double min_margin = 0.0;  // smallest best-vs-runner-up gap across units
};

enum class FeatureRegime { CE, WE, WE_CE };

const char* regime_name(FeatureRegime r);
FeatureRegime regime_from_name(const std::string& name);
int regime_input_dim(FeatureRegime r, int d_we, int d_ce);

// Column read realizing M^we times the one-hot of word_id.
Vector lookup_word(const WordEmbeddingTable& table, int word_id);

std::pair<Vector, CharCnnTrace> char_embed(const CharCnn& cnn, const CharEmbeddingTable& table,
                                           const std::vector<int>& char_ids);

struct CharCnnGrads {
    Matrix dW;
    Vector db;
    std::map<int, Vector> dchar_cols; // char id -> gradient of that column
};

CharCnnGrads backprop_char_embed(const CharCnn& cnn, const CharEmbeddingTable& table,
                                 const CharCnnTrace& trace, const Vector& grad_y);

// CE -> y, WE -> w, WE_CE -> concat(w, y). Null pointers flag a missing table.
Vector token_features(FeatureRegime regime, const Vector* w, const Vector* y);

struct PretrainedOptions {
    std::string rare_token = "<RARE>";
    double random_range = 0.01; // for vocab words with no file vector and no rare vector
};

// Text word-vector format: optional "count dim" header line, then
// "word v1 ... v_d" per line.
WordEmbeddingTable load_pretrained(const std::string& path, const Vocabulary& vocab, int d_we,
                                   Rng& rng, const PretrainedOptions& opts = {});
void save_word_vectors(const std::string& path, const Vocabulary& vocab,
                       const WordEmbeddingTable& table);

} // namespace seqtag
