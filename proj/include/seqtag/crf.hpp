#pragma once

#include "seqtag/tensor.hpp"

#include <vector>

namespace seqtag {

// Transition scores: (|T|+1) x |T| with trans(k, j) the score of tag j
// following tag k; row |T| scores starting the sentence with tag j.
inline std::size_t start_row(const Matrix& trans) { return trans.rows() - 1; }

Matrix make_transitions(std::size_t n_tags); // zero-initialized

double sentence_score(const std::vector<Vector>& emissions, const std::vector<int>& tags,
                      const Matrix& trans);

// log of the sum over all |T|^|s| tag sequences of exp(sentence_score),
// via the stable forward recursion.
double log_partition(const std::vector<Vector>& emissions, const Matrix& trans);

// |s| x |T| matrix of per-position tag probabilities; rows sum to 1.
Matrix marginals(const std::vector<Vector>& emissions, const Matrix& trans);

struct CrfNll {
    double loss = 0.0;                 // log_partition - gold score, >= 0
    std::vector<Vector> grad_emissions;
    Matrix grad_trans;
};

CrfNll nll_and_gradients(const std::vector<Vector>& emissions, const std::vector<int>& gold,
                         const Matrix& trans);

struct DecodeResult {
    std::vector<int> tags;
    double score = 0.0;
};

// Highest-scoring tag sequence; ties broken toward the lower tag index.
DecodeResult viterbi(const std::vector<Vector>& emissions, const Matrix& trans);

} // namespace seqtag
