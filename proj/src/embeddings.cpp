#include "seqtag/embeddings.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace seqtag {

const char* regime_name(FeatureRegime r) {
    switch (r) {
        case FeatureRegime::CE: return "CE";
        case FeatureRegime::WE: return "WE";
        case FeatureRegime::WE_CE: return "WE+CE";
    }
    return "?";
}

FeatureRegime regime_from_name(const std::string& name) {
    if (name == "ce" || name == "CE") return FeatureRegime::CE;
    if (name == "we" || name == "WE") return FeatureRegime::WE;
    if (name == "we+ce" || name == "WE+CE" || name == "we_ce") return FeatureRegime::WE_CE;
    throw std::invalid_argument("unknown feature regime: " + name);
}

int regime_input_dim(FeatureRegime r, int d_we, int d_ce) {
    switch (r) {
        case FeatureRegime::CE: return d_ce;
        case FeatureRegime::WE: return d_we;
        case FeatureRegime::WE_CE: return d_we + d_ce;
    }
    return 0;
}

Vector lookup_word(const WordEmbeddingTable& table, int word_id) {
    if (word_id < 0 || static_cast<std::size_t>(word_id) >= table.M.cols())
        throw std::out_of_range("lookup_word: word id " + std::to_string(word_id) +
                                " out of range for vocabulary of " + std::to_string(table.M.cols()));
    return table.M.col(static_cast<std::size_t>(word_id));
}

namespace {

std::vector<int> pad_char_ids(const std::vector<int>& char_ids, int window) {
    const int side = (window - 1) / 2;
    std::vector<int> padded;
    padded.reserve(char_ids.size() + 2 * side);
    for (int i = 0; i < side; ++i) padded.push_back(Vocabulary::kPadLeft);
    padded.insert(padded.end(), char_ids.begin(), char_ids.end());
    for (int i = 0; i < side; ++i) padded.push_back(Vocabulary::kPadRight);
    return padded;
}

// Concatenation of the k character vectors of window w over the padded ids.
Vector window_input(const CharEmbeddingTable& table, const std::vector<int>& padded, int w, int k) {
    const int d = table.dim();
    Vector q(static_cast<std::size_t>(d) * k);
    for (int j = 0; j < k; ++j) {
        const int id = padded[w + j];
        for (int r = 0; r < d; ++r) q[static_cast<std::size_t>(j) * d + r] = table.M(r, id);
    }
    return q;
}

} // namespace

std::pair<Vector, CharCnnTrace> char_embed(const CharCnn& cnn, const CharEmbeddingTable& table,
                                           const std::vector<int>& char_ids) {
    if (char_ids.empty()) throw std::invalid_argument("char_embed: empty character list");
    if (cnn.window % 2 == 0) throw std::invalid_argument("char_embed: window must be odd");
    if (cnn.W.cols() != static_cast<std::size_t>(table.dim()) * cnn.window)
        shape_error("char_embed: filter expects " + std::to_string(cnn.W.cols()) +
                    " inputs but table dim * window is " +
                    std::to_string(table.dim() * cnn.window));

    const int n_windows = static_cast<int>(char_ids.size());
    const int d_ce = cnn.out_dim();

    CharCnnTrace trace;
    trace.padded_ids = pad_char_ids(char_ids, cnn.window);
    trace.argmax.assign(d_ce, 0);
    trace.min_margin = std::numeric_limits<double>::infinity();

    Vector best(d_ce, -std::numeric_limits<double>::infinity());
    Vector second(d_ce, -std::numeric_limits<double>::infinity());
    for (int w = 0; w < n_windows; ++w) {
        const Vector q = window_input(table, trace.padded_ids, w, cnn.window);
        const Vector score = vadd(matvec(cnn.W, q), cnn.b);
        for (int j = 0; j < d_ce; ++j) {
            if (score[j] > best[j]) {
                second[j] = best[j];
                best[j] = score[j];
                trace.argmax[j] = w;
            } else if (score[j] > second[j]) {
                second[j] = score[j];
            }
        }
    }
    if (n_windows > 1)
        for (int j = 0; j < d_ce; ++j)
            trace.min_margin = std::min(trace.min_margin, best[j] - second[j]);
    return {best, trace};
}

CharCnnGrads backprop_char_embed(const CharCnn& cnn, const CharEmbeddingTable& table,
                                 const CharCnnTrace& trace, const Vector& grad_y) {
    const int d_ce = cnn.out_dim();
    const int d = table.dim();
    if (static_cast<int>(trace.argmax.size()) != d_ce)
        throw std::runtime_error("backprop_char_embed: trace does not match this CNN");
    if (static_cast<int>(grad_y.size()) != d_ce)
        shape_error("backprop_char_embed: grad length " + std::to_string(grad_y.size()) +
                    " vs output dim " + std::to_string(d_ce));
    if (trace.padded_ids.size() < static_cast<std::size_t>(cnn.window))
        throw std::runtime_error("backprop_char_embed: stale trace (too few padded ids)");

    CharCnnGrads g;
    g.dW = Matrix(cnn.W.rows(), cnn.W.cols());
    g.db = Vector(static_cast<std::size_t>(d_ce), 0.0);

    for (int j = 0; j < d_ce; ++j) {
        const double gj = grad_y[j];
        if (gj == 0.0) continue;
        const int w = trace.argmax[j];
        g.db[j] += gj;
        const Vector q = window_input(table, trace.padded_ids, w, cnn.window);
        for (std::size_t c = 0; c < q.size(); ++c) g.dW(j, c) += gj * q[c];
        // route into the k character columns of the winning window
        for (int p = 0; p < cnn.window; ++p) {
            const int id = trace.padded_ids[w + p];
            auto [it, inserted] = g.dchar_cols.try_emplace(id, Vector(static_cast<std::size_t>(d), 0.0));
            for (int r = 0; r < d; ++r)
                it->second[r] += gj * cnn.W(j, static_cast<std::size_t>(p) * d + r);
        }
    }
    return g;
}

Vector token_features(FeatureRegime regime, const Vector* w, const Vector* y) {
    switch (regime) {
        case FeatureRegime::CE:
            if (!y) throw std::invalid_argument("token_features: CE regime needs a character embedding");
            return *y;
        case FeatureRegime::WE:
            if (!w) throw std::invalid_argument("token_features: WE regime needs a word embedding");
            return *w;
        case FeatureRegime::WE_CE:
            if (!w || !y)
                throw std::invalid_argument("token_features: WE+CE regime needs both embeddings");
            return concat(*w, *y);
    }
    throw std::invalid_argument("token_features: bad regime");
}

WordEmbeddingTable load_pretrained(const std::string& path, const Vocabulary& vocab, int d_we,
                                   Rng& rng, const PretrainedOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open word-vector file: " + path);

    WordEmbeddingTable table;
    table.M = Matrix(static_cast<std::size_t>(d_we), vocab.size());
    std::vector<bool> found(vocab.size(), false);
    Vector rare_vec;

    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;

        if (first) {
            first = false;
            // optional "count dim" header
            long long maybe_dim = 0;
            std::istringstream probe(line);
            long long a = 0;
            if ((probe >> a >> maybe_dim) && probe.eof() && a > 0) {
                if (maybe_dim != d_we)
                    throw std::runtime_error(path + ": header dimension " + std::to_string(maybe_dim) +
                                             " does not match requested " + std::to_string(d_we));
                continue;
            }
        }

        Vector vec;
        vec.reserve(static_cast<std::size_t>(d_we));
        double x;
        while (ls >> x) vec.push_back(x);
        if (static_cast<int>(vec.size()) != d_we)
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(d_we) + " values for '" + word + "', got " +
                                     std::to_string(vec.size()));

        if (word == opts.rare_token) rare_vec = vec;
        if (vocab.contains(word)) {
            const int id = vocab.lookup(word);
            table.M.set_col(static_cast<std::size_t>(id), vec);
            found[static_cast<std::size_t>(id)] = true;
        }
    }

    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (found[i]) continue;
        if (!rare_vec.empty()) {
            table.M.set_col(i, rare_vec);
        } else {
            table.M.set_col(i, rng.uniform_vec(static_cast<std::size_t>(d_we), -opts.random_range,
                                               opts.random_range));
        }
    }
    return table;
}

void save_word_vectors(const std::string& path, const Vocabulary& vocab,
                       const WordEmbeddingTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write word-vector file: " + path);
    out << vocab.size() << " " << table.dim() << "\n";
    char buf[64];
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        out << vocab.items[i];
        for (int r = 0; r < table.dim(); ++r) {
            std::snprintf(buf, sizeof(buf), " %.17g", table.M(static_cast<std::size_t>(r), i));
            out << buf;
        }
        out << "\n";
    }
}

} // namespace seqtag
