#pragma once

#include "seqtag/tensor.hpp"

#include <string>
#include <variant>
#include <vector>

namespace seqtag {

enum class Architecture { BiRNN, BiLSTM, BiGRU, WindowNN };

const char* architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

struct EncoderConfig {
    Architecture arch = Architecture::BiLSTM;
    int n_in = 0;
    int n_hidden = 100;
    int n_out = 0;
    int window = 5;       // WindowNN context width, odd
    bool rnn_bias = true; // false restores the bias-free BiRNN recurrence
};

struct RnnDir {
    Matrix U, W; // n_H x n_I, n_H x n_H
    Vector b, h0;
};
struct BiRnnParams {
    RnnDir left, right;
    Matrix V; // n_O x 2 n_H
};

struct LstmDir {
    Matrix Ui, Uf, Uo, Ug;
    Matrix Wi, Wf, Wo, Wg;
    Vector bi, bf, bo, bg;
    Vector h0, c0;
};
struct LstmParams {
    LstmDir left, right;
    Matrix V;
};

struct GruDir {
    Matrix Uz, Ur, Uh;
    Matrix Wz, Wr, Wh;
    Vector bz, br, bh;
    Vector h0;
};
struct GruParams {
    GruDir left, right;
    Matrix V;
};

struct WindowNnParams {
    Matrix H;  // n_H x (window * n_I)
    Vector bh; // n_H
    Matrix V;  // n_O x n_H
    Vector pad_left, pad_right; // trainable boundary feature vectors, n_I each
};

using EncoderParams = std::variant<BiRnnParams, LstmParams, GruParams, WindowNnParams>;

// Per-direction step caches, in processing order (the right direction's
// processing order is the reversed sentence).
struct RnnDirTrace {
    std::vector<Vector> h; // h[0] = h0, h[p+1] = state after consuming step p
};
struct LstmDirTrace {
    std::vector<Vector> i, f, o, g; // index p = 0..n-1
    std::vector<Vector> c, h;       // index 0..n with [0] = c0/h0
};
struct GruDirTrace {
    std::vector<Vector> z, r, htil, s; // s = r (*) h_prev
    std::vector<Vector> h;             // index 0..n with [0] = h0
};
struct BiRnnTrace { RnnDirTrace left, right; };
struct LstmTrace { LstmDirTrace left, right; };
struct GruTrace { GruDirTrace left, right; };
struct WindowTrace {
    std::vector<Vector> cat;    // concatenated window input per token
    std::vector<Vector> hidden; // tanh hidden per token
};

struct ForwardTrace {
    std::vector<Vector> xs;
    std::variant<BiRnnTrace, LstmTrace, GruTrace, WindowTrace> detail;
};

struct EncoderForward {
    std::vector<Vector> scores; // one length-n_O vector per token
    ForwardTrace trace;
};

struct EncoderBackward {
    EncoderParams grads;     // same shapes as the parameters
    std::vector<Vector> dx;  // per-token feature gradients
};

EncoderParams init_params(const EncoderConfig& cfg, Rng& rng);

EncoderForward forward(const EncoderParams& params, const EncoderConfig& cfg,
                       const std::vector<Vector>& xs);

EncoderBackward backward(const EncoderParams& params, const EncoderConfig& cfg,
                         const ForwardTrace& trace, const std::vector<Vector>& grad_scores);

// Exact trainable scalar count for the encoder alone (embedding tables excluded).
std::size_t count_params(const EncoderConfig& cfg);

std::vector<TensorRef> param_refs(EncoderParams& params);

// Identical structure with every tensor zeroed; gradient accumulator.
EncoderParams zeros_like(const EncoderParams& params);

// Exchanges the left/right recurrent blocks and the two column halves of V.
EncoderParams swap_directions(const EncoderParams& params);

} // namespace seqtag
