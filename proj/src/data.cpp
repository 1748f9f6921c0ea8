#include "seqtag/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace seqtag {

const char* Vocabulary::kRareToken = "<RARE>";
const char* Vocabulary::kPadLeftToken = "<PAD1>";
const char* Vocabulary::kPadRightToken = "<PAD2>";

TagSet TagSet::for_classes(const std::vector<std::string>& classes) {
    TagSet ts;
    ts.classes = classes;
    ts.tags.push_back("O");
    for (const auto& c : classes) {
        ts.tags.push_back("B-" + c);
        ts.tags.push_back("I-" + c);
    }
    return ts;
}

TagSet TagSet::task_a() { return for_classes({"DISEASE"}); }

TagSet TagSet::task_b() {
    return for_classes({"SpecificDisease", "DiseaseClass", "Modifier", "CompositeMention"});
}

int TagSet::index_of(const std::string& tag) const {
    for (std::size_t i = 0; i < tags.size(); ++i)
        if (tags[i] == tag) return static_cast<int>(i);
    return -1;
}

Vocabulary::Vocabulary() {
    add(kRareToken);
    add(kPadLeftToken);
    add(kPadRightToken);
}

void Vocabulary::add(const std::string& s) {
    if (index.count(s)) return;
    index.emplace(s, static_cast<int>(items.size()));
    items.push_back(s);
}

int Vocabulary::lookup(const std::string& s) const {
    auto it = index.find(s);
    return it == index.end() ? kRare : it->second;
}

void save_vocabulary(const Vocabulary& v, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write vocabulary file: " + path);
    for (const auto& item : v.items) out << item << "\n";
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read vocabulary file: " + path);
    Vocabulary v;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (n < 3) {
            if (line != v.items[n])
                throw std::runtime_error("vocabulary file " + path + ": line " + std::to_string(n + 1) +
                                         " must be the special token " + v.items[n]);
        } else {
            v.add(line);
        }
        ++n;
    }
    if (n < 3) throw std::runtime_error("vocabulary file " + path + ": missing special-token header");
    return v;
}

std::string lowercase(const std::string& token) {
    std::string out = token;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

WordNorm word_norm_from_name(const std::string& name) {
    if (name == "none") return WordNorm::None;
    if (name == "lower") return WordNorm::Lower;
    if (name == "lower+digits" || name == "lower_digits") return WordNorm::LowerDigits;
    throw std::invalid_argument("unknown word normalization: " + name);
}

const char* word_norm_name(WordNorm norm) {
    switch (norm) {
        case WordNorm::None: return "none";
        case WordNorm::Lower: return "lower";
        case WordNorm::LowerDigits: return "lower+digits";
    }
    return "?";
}

std::string normalize_word(const std::string& token, WordNorm norm) {
    if (norm == WordNorm::None) return token;
    std::string out = lowercase(token);
    if (norm == WordNorm::LowerDigits)
        for (char& c : out)
            if (std::isdigit(static_cast<unsigned char>(c))) c = '0';
    return out;
}

namespace {

void validate_or_repair_bio(std::vector<int>& tags, const TagSet& tagset, bool repair,
                            std::size_t sentence_index) {
    int prev = tagset.o_index();
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const int t = tags[i];
        if (tagset.is_i(t)) {
            const int cls = tagset.class_of(t);
            const bool ok = (tagset.is_b(prev) || tagset.is_i(prev)) && tagset.class_of(prev) == cls;
            if (!ok) {
                if (repair) {
                    tags[i] = tagset.b_tag(cls);
                } else {
                    throw std::runtime_error("invalid BIO transition in sentence " +
                                             std::to_string(sentence_index + 1) + " at token " +
                                             std::to_string(i + 1) + ": " + tagset.tags[t] +
                                             " cannot follow " + tagset.tags[prev]);
                }
            }
        }
        prev = tags[i];
    }
}

} // namespace

Corpus parse_conll(std::istream& in, const TagSet& tagset, const ParseOptions& opts) {
    Corpus corpus;
    TaggedSentence cur;
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&]() {
        if (cur.tokens.empty()) return;
        validate_or_repair_bio(cur.gold_tags, tagset, opts.repair_bio, corpus.size());
        corpus.push_back(std::move(cur));
        cur = TaggedSentence{};
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected token<TAB>tag, got: " + line);
        const std::string token = line.substr(0, tab);
        const std::string tag = line.substr(tab + 1);
        const int tag_id = tagset.index_of(tag);
        if (tag_id < 0)
            throw std::runtime_error("line " + std::to_string(line_no) + ": unknown tag " + tag);
        cur.tokens.push_back(token);
        cur.gold_tags.push_back(tag_id);
    }
    flush();
    return corpus;
}

Corpus parse_conll_file(const std::string& path, const TagSet& tagset, const ParseOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return parse_conll(in, tagset, opts);
}

void write_conll(std::ostream& out, const Corpus& corpus, const TagSet& tagset) {
    for (const auto& s : corpus) {
        for (std::size_t i = 0; i < s.tokens.size(); ++i)
            out << s.tokens[i] << "\t" << tagset.tags[s.gold_tags[i]] << "\n";
        out << "\n";
    }
}

void write_conll_file(const std::string& path, const Corpus& corpus, const TagSet& tagset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    write_conll(out, corpus, tagset);
}

std::pair<Vocabulary, Vocabulary> build_vocabularies(const Corpus& corpus, int min_freq,
                                                     WordNorm norm) {
    if (corpus.empty()) throw std::runtime_error("build_vocabularies: empty corpus");

    std::map<std::string, std::size_t> word_freq;
    std::map<std::string, std::size_t> char_freq;
    for (const auto& s : corpus) {
        for (const auto& tok : s.tokens) {
            ++word_freq[normalize_word(tok, norm)];
            for (char c : lowercase(tok)) ++char_freq[std::string(1, c)];
        }
    }

    auto ordered = [](const std::map<std::string, std::size_t>& freq, std::size_t cutoff) {
        std::vector<std::pair<std::string, std::size_t>> v(freq.begin(), freq.end());
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::vector<std::string> out;
        for (const auto& [item, n] : v)
            if (n >= cutoff) out.push_back(item);
        return out;
    };

    Vocabulary words, chars;
    for (const auto& w : ordered(word_freq, static_cast<std::size_t>(std::max(1, min_freq))))
        words.add(w);
    for (const auto& c : ordered(char_freq, 1)) chars.add(c);
    return {words, chars};
}

void assign_ids(Corpus& corpus, const Vocabulary& words, const Vocabulary& chars, WordNorm norm) {
    for (auto& s : corpus) {
        s.word_ids.clear();
        s.char_ids.clear();
        for (const auto& tok : s.tokens) {
            s.word_ids.push_back(words.lookup(normalize_word(tok, norm)));
            std::vector<int> ids;
            for (char c : lowercase(tok)) ids.push_back(chars.lookup(std::string(1, c)));
            s.char_ids.push_back(std::move(ids));
        }
    }
}

std::vector<Mention> gold_mentions(const std::vector<int>& tags, const TagSet& tagset) {
    std::vector<Mention> out;
    for (std::size_t i = 0; i < tags.size();) {
        if (tagset.is_b(tags[i])) {
            const int cls = tagset.class_of(tags[i]);
            std::size_t j = i + 1;
            while (j < tags.size() && tagset.is_i(tags[j]) && tagset.class_of(tags[j]) == cls) ++j;
            out.push_back({static_cast<int>(i), static_cast<int>(j - 1), cls});
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

CorpusStats corpus_stats(const Corpus& corpus, const TagSet& tagset) {
    CorpusStats stats;
    stats.sentences = corpus.size();
    stats.per_class.assign(tagset.classes.size(), 0);
    for (const auto& s : corpus) {
        for (const auto& m : gold_mentions(s.gold_tags, tagset)) {
            ++stats.mentions;
            ++stats.per_class[m.cls];
        }
    }
    return stats;
}

std::pair<Corpus, TagSet> flatten_to_task_a(const Corpus& corpus, const TagSet& tagset_b) {
    TagSet a = TagSet::task_a();
    Corpus out = corpus;
    for (auto& s : out) {
        for (int& t : s.gold_tags) {
            if (tagset_b.is_b(t))
                t = a.b_tag(0);
            else if (tagset_b.is_i(t))
                t = a.i_tag(0);
            else
                t = a.o_index();
        }
    }
    return {out, a};
}

} // namespace seqtag
