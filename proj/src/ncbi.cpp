#include "seqtag/ncbi.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace seqtag {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto tab = line.find('\t', pos);
        if (tab == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

} // namespace

std::vector<NcbiDocument> parse_ncbi(std::istream& in) {
    std::vector<NcbiDocument> docs;
    NcbiDocument cur;
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&]() {
        if (!cur.id.empty()) docs.push_back(std::move(cur));
        cur = NcbiDocument{};
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        const auto where = " (line " + std::to_string(line_no) + ")";
        const auto t_mark = line.find("|t|");
        const auto a_mark = line.find("|a|");
        if (t_mark != std::string::npos && line.find('\t') == std::string::npos) {
            if (!cur.id.empty() && cur.id != line.substr(0, t_mark)) flush();
            cur.id = line.substr(0, t_mark);
            cur.title = line.substr(t_mark + 3);
        } else if (a_mark != std::string::npos && line.find('\t') == std::string::npos) {
            const std::string id = line.substr(0, a_mark);
            if (cur.id != id) throw std::runtime_error("abstract for unknown document " + id + where);
            cur.abstract_text = line.substr(a_mark + 3);
        } else {
            const auto fields = split_tabs(line);
            if (fields.size() < 5)
                throw std::runtime_error("malformed annotation line" + where + ": " + line);
            if (fields[0] != cur.id)
                throw std::runtime_error("annotation for unknown document " + fields[0] + where);
            NcbiAnnotation ann;
            try {
                ann.start = std::stoi(fields[1]);
                ann.end = std::stoi(fields[2]);
            } catch (const std::exception&) {
                throw std::runtime_error("bad annotation offsets" + where + ": " + line);
            }
            ann.text = fields[3];
            ann.category = fields[4];
            cur.annotations.push_back(std::move(ann));
        }
    }
    flush();
    return docs;
}

std::vector<NcbiDocument> parse_ncbi_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open NCBI corpus file: " + path);
    return parse_ncbi(in);
}

namespace {

bool inside_annotation(const std::vector<NcbiAnnotation>& anns, int pos) {
    for (const auto& a : anns)
        if (pos > a.start && pos < a.end) return true;
    return false;
}

std::vector<std::pair<int, int>> split_sentences(const std::string& text,
                                                 const std::vector<NcbiAnnotation>& anns) {
    std::vector<std::pair<int, int>> spans;
    const int n = static_cast<int>(text.size());
    int start = 0;
    for (int i = 0; i < n; ++i) {
        const char c = text[i];
        if (c != '.' && c != '?' && c != '!') continue;
        int j = i + 1;
        if (j >= n) break;
        if (!std::isspace(static_cast<unsigned char>(text[j]))) continue;
        while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j >= n) break;
        const unsigned char next = static_cast<unsigned char>(text[j]);
        if (!std::isupper(next) && !std::isdigit(next)) continue;
        if (inside_annotation(anns, i + 1) || inside_annotation(anns, j)) continue;
        spans.emplace_back(start, i + 1);
        start = j;
        i = j - 1;
    }
    if (start < n) spans.emplace_back(start, n);
    return spans;
}

std::vector<ConvertedToken> tokenize(const std::string& text, int begin, int end) {
    std::vector<ConvertedToken> out;
    int i = begin;
    while (i < end) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (std::isalnum(c)) {
            int j = i;
            while (j < end && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({text.substr(i, j - i), i, j, 0});
            i = j;
        } else {
            out.push_back({text.substr(i, 1), i, i + 1, 0});
            ++i;
        }
    }
    return out;
}

} // namespace

std::vector<ConvertedDocument> convert_ncbi(const std::vector<NcbiDocument>& docs,
                                            const TagSet& tagset) {
    std::vector<ConvertedDocument> out;
    for (const auto& doc : docs) {
        ConvertedDocument conv;
        conv.id = doc.id;
        conv.text = doc.title + " " + doc.abstract_text;

        auto anns = doc.annotations;
        std::sort(anns.begin(), anns.end(),
                  [](const NcbiAnnotation& a, const NcbiAnnotation& b) { return a.start < b.start; });
        auto class_index = [&tagset](const std::string& category) {
            for (std::size_t c = 0; c < tagset.classes.size(); ++c)
                if (tagset.classes[c] == category) return static_cast<int>(c);
            return -1;
        };

        for (const auto& a : anns) {
            if (a.start < 0 || a.end > static_cast<int>(conv.text.size()) || a.start >= a.end)
                throw std::runtime_error("document " + doc.id + ": annotation offsets " +
                                         std::to_string(a.start) + ".." + std::to_string(a.end) +
                                         " out of range");
            const std::string snippet = conv.text.substr(a.start, a.end - a.start);
            if (snippet != a.text)
                throw std::runtime_error("document " + doc.id + ": annotation text mismatch at " +
                                         std::to_string(a.start) + ": corpus has '" + snippet +
                                         "' but annotation says '" + a.text + "'");
            if (class_index(a.category) < 0)
                throw std::runtime_error("document " + doc.id + ": unknown category " + a.category);
        }

        for (const auto& [sb, se] : split_sentences(conv.text, anns)) {
            ConvertedSentence sent;
            sent.tokens = tokenize(conv.text, sb, se);
            if (sent.tokens.empty()) continue;

            for (const auto& a : anns) {
                if (a.end <= sb || a.start >= se) continue;
                const int cls = class_index(a.category);
                bool first = true;
                for (auto& tok : sent.tokens) {
                    if (tok.begin < a.end && a.start < tok.end) {
                        tok.tag = first ? tagset.b_tag(cls) : tagset.i_tag(cls);
                        first = false;
                    }
                }
            }
            conv.sentences.push_back(std::move(sent));
        }
        out.push_back(std::move(conv));
    }
    return out;
}

Corpus to_corpus(const std::vector<ConvertedDocument>& docs) {
    Corpus corpus;
    for (const auto& doc : docs) {
        for (const auto& sent : doc.sentences) {
            TaggedSentence s;
            for (const auto& tok : sent.tokens) {
                s.tokens.push_back(tok.text);
                s.gold_tags.push_back(tok.tag);
            }
            corpus.push_back(std::move(s));
        }
    }
    return corpus;
}

} // namespace seqtag
