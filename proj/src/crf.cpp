#include "seqtag/crf.hpp"

#include <cmath>
#include <stdexcept>

namespace seqtag {

namespace {

std::size_t check_lattice(const std::vector<Vector>& emissions, const Matrix& trans) {
    if (emissions.empty()) throw std::invalid_argument("crf: empty lattice");
    const std::size_t n_tags = trans.cols();
    if (trans.rows() != n_tags + 1)
        shape_error("crf: transition matrix must be (|T|+1) x |T|, got " +
                    std::to_string(trans.rows()) + "x" + std::to_string(trans.cols()));
    for (const auto& e : emissions)
        if (e.size() != n_tags)
            shape_error("crf: emission length " + std::to_string(e.size()) + " but |T| is " +
                        std::to_string(n_tags));
    return n_tags;
}

// alpha[t][j] = log sum of exp(score) over all prefixes ending in tag j at t
std::vector<Vector> forward_log(const std::vector<Vector>& emissions, const Matrix& trans) {
    const std::size_t n = emissions.size();
    const std::size_t T = trans.cols();
    std::vector<Vector> alpha(n, Vector(T, 0.0));
    for (std::size_t j = 0; j < T; ++j) alpha[0][j] = trans(start_row(trans), j) + emissions[0][j];
    Vector acc(T);
    for (std::size_t t = 1; t < n; ++t) {
        for (std::size_t j = 0; j < T; ++j) {
            for (std::size_t k = 0; k < T; ++k) acc[k] = alpha[t - 1][k] + trans(k, j);
            alpha[t][j] = emissions[t][j] + log_sum_exp(acc);
        }
    }
    return alpha;
}

// beta[t][k] = log sum of exp(score of the suffix after position t) given tag k at t
std::vector<Vector> backward_log(const std::vector<Vector>& emissions, const Matrix& trans) {
    const std::size_t n = emissions.size();
    const std::size_t T = trans.cols();
    std::vector<Vector> beta(n, Vector(T, 0.0));
    Vector acc(T);
    for (std::size_t t = n - 1; t-- > 0;) {
        for (std::size_t k = 0; k < T; ++k) {
            for (std::size_t j = 0; j < T; ++j)
                acc[j] = trans(k, j) + emissions[t + 1][j] + beta[t + 1][j];
            beta[t][k] = log_sum_exp(acc);
        }
    }
    return beta;
}

} // namespace

Matrix make_transitions(std::size_t n_tags) { return Matrix(n_tags + 1, n_tags, 0.0); }

double sentence_score(const std::vector<Vector>& emissions, const std::vector<int>& tags,
                      const Matrix& trans) {
    const std::size_t T = check_lattice(emissions, trans);
    if (tags.size() != emissions.size())
        throw std::invalid_argument("sentence_score: " + std::to_string(tags.size()) +
                                    " tags for " + std::to_string(emissions.size()) + " tokens");
    double score = 0.0;
    std::size_t prev = start_row(trans);
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const int t = tags[i];
        if (t < 0 || static_cast<std::size_t>(t) >= T)
            throw std::invalid_argument("sentence_score: tag index " + std::to_string(t) +
                                        " out of range");
        score += trans(prev, t) + emissions[i][t];
        prev = static_cast<std::size_t>(t);
    }
    return score;
}

double log_partition(const std::vector<Vector>& emissions, const Matrix& trans) {
    check_lattice(emissions, trans);
    const auto alpha = forward_log(emissions, trans);
    return log_sum_exp(alpha.back());
}

Matrix marginals(const std::vector<Vector>& emissions, const Matrix& trans) {
    const std::size_t T = check_lattice(emissions, trans);
    const std::size_t n = emissions.size();
    const auto alpha = forward_log(emissions, trans);
    const auto beta = backward_log(emissions, trans);
    const double logz = log_sum_exp(alpha.back());
    Matrix m(n, T);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < T; ++j) m(t, j) = std::exp(alpha[t][j] + beta[t][j] - logz);
    return m;
}

CrfNll nll_and_gradients(const std::vector<Vector>& emissions, const std::vector<int>& gold,
                         const Matrix& trans) {
    const std::size_t T = check_lattice(emissions, trans);
    const std::size_t n = emissions.size();
    if (gold.size() != n)
        throw std::invalid_argument("nll_and_gradients: gold length mismatch");

    const auto alpha = forward_log(emissions, trans);
    const auto beta = backward_log(emissions, trans);
    const double logz = log_sum_exp(alpha.back());
    const double gold_score = sentence_score(emissions, gold, trans);

    CrfNll out;
    out.loss = logz - gold_score;
    out.grad_emissions.assign(n, Vector(T, 0.0));
    out.grad_trans = Matrix(trans.rows(), trans.cols());

    // unary marginals minus the gold one-hot
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < T; ++j)
            out.grad_emissions[t][j] = std::exp(alpha[t][j] + beta[t][j] - logz);
        out.grad_emissions[t][gold[t]] -= 1.0;
    }

    // start row: P(t_1 = j) - observed
    for (std::size_t j = 0; j < T; ++j)
        out.grad_trans(start_row(trans), j) = std::exp(alpha[0][j] + beta[0][j] - logz);
    out.grad_trans(start_row(trans), gold[0]) -= 1.0;

    // pairwise expectations minus observed counts
    for (std::size_t t = 1; t < n; ++t) {
        for (std::size_t k = 0; k < T; ++k)
            for (std::size_t j = 0; j < T; ++j)
                out.grad_trans(k, j) +=
                    std::exp(alpha[t - 1][k] + trans(k, j) + emissions[t][j] + beta[t][j] - logz);
        out.grad_trans(gold[t - 1], gold[t]) -= 1.0;
    }
    return out;
}

DecodeResult viterbi(const std::vector<Vector>& emissions, const Matrix& trans) {
    const std::size_t T = check_lattice(emissions, trans);
    const std::size_t n = emissions.size();

    std::vector<Vector> delta(n, Vector(T, 0.0));
    std::vector<std::vector<int>> back(n, std::vector<int>(T, -1));
    for (std::size_t j = 0; j < T; ++j) delta[0][j] = trans(start_row(trans), j) + emissions[0][j];
    for (std::size_t t = 1; t < n; ++t) {
        for (std::size_t j = 0; j < T; ++j) {
            double best = delta[t - 1][0] + trans(0, j);
            int arg = 0;
            for (std::size_t k = 1; k < T; ++k) {
                const double s = delta[t - 1][k] + trans(k, j);
                if (s > best) { // strict: ties keep the lower index
                    best = s;
                    arg = static_cast<int>(k);
                }
            }
            delta[t][j] = emissions[t][j] + best;
            back[t][j] = arg;
        }
    }

    DecodeResult res;
    res.tags.assign(n, 0);
    int arg = 0;
    double best = delta[n - 1][0];
    for (std::size_t j = 1; j < T; ++j)
        if (delta[n - 1][j] > best) {
            best = delta[n - 1][j];
            arg = static_cast<int>(j);
        }
    res.tags[n - 1] = arg;
    for (std::size_t t = n - 1; t >  0; --t) res.tags[t - 1] = back[t][res.tags[t]];
    res.score = sentence_score(emissions, res.tags, trans);
    return res;
}

} // namespace seqtag
