#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace seqtag {

// BIO tag inventory. Index 0 is always O; class c owns B at 1+2c and I at 2+2c.
struct TagSet {
    std::vector<std::string> tags;
    std::vector<std::string> classes;

    static TagSet for_classes(const std::vector<std::string>& classes);
    static TagSet task_a(); // single DISEASE class, 3 tags
    static TagSet task_b(); // SpecificDisease, DiseaseClass, Modifier, CompositeMention

    std::size_t size() const { return tags.size(); }
    int o_index() const { return 0; }
    bool is_b(int tag) const { return tag > 0 && (tag - 1) % 2 == 0; }
    bool is_i(int tag) const { return tag > 0 && (tag - 1) % 2 == 1; }
    // Class index of a B/I tag, -1 for O.
    int class_of(int tag) const { return tag == 0 ? -1 : (tag - 1) / 2; }
    int b_tag(int cls) const { return 1 + 2 * cls; }
    int i_tag(int cls) const { return 2 + 2 * cls; }
    // -1 if unknown.
    int index_of(const std::string& tag) const;

    bool operator==(const TagSet& o) const { return tags == o.tags && classes == o.classes; }
};

// String <-> index map with RARE and the two pads pinned to 0, 1, 2.
struct Vocabulary {
    static constexpr int kRare = 0;
    static constexpr int kPadLeft = 1;
    static constexpr int kPadRight = 2;
    static const char* kRareToken;
    static const char* kPadLeftToken;
    static const char* kPadRightToken;

    std::vector<std::string> items;
    std::unordered_map<std::string, int> index;

    Vocabulary();
    void add(const std::string& s);
    std::size_t size() const { return items.size(); }
    // Maps unknown strings to kRare.
    int lookup(const std::string& s) const;
    bool contains(const std::string& s) const { return index.count(s) != 0; }

    bool operator==(const Vocabulary& o) const { return items == o.items; }
};

void save_vocabulary(const Vocabulary& v, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

struct TaggedSentence {
    std::vector<std::string> tokens;
    std::vector<int> word_ids;                // filled by assign_ids
    std::vector<std::vector<int>> char_ids;   // filled by assign_ids
    std::vector<int> gold_tags;
    std::size_t size() const { return tokens.size(); }
};

using Corpus = std::vector<TaggedSentence>;

struct ParseOptions {
    bool repair_bio = false; // orphan I-x becomes B-x instead of erroring
};

Corpus parse_conll(std::istream& in, const TagSet& tagset, const ParseOptions& opts = {});
Corpus parse_conll_file(const std::string& path, const TagSet& tagset, const ParseOptions& opts = {});
void write_conll(std::ostream& out, const Corpus& corpus, const TagSet& tagset);
void write_conll_file(const std::string& path, const Corpus& corpus, const TagSet& tagset);

// Normalization applied to tokens before word-vocabulary lookup. Character
// indexing always lowercases, independent of this choice.
enum class WordNorm { None, Lower, LowerDigits };

WordNorm word_norm_from_name(const std::string& name);
const char* word_norm_name(WordNorm norm);

std::string normalize_word(const std::string& token, WordNorm norm = WordNorm::LowerDigits);
std::string lowercase(const std::string& token);

// Word vocab over normalized tokens (frequency desc, ties lexicographic),
// char vocab over lowercased characters (same ordering). min_freq applies
// to words only.
std::pair<Vocabulary, Vocabulary> build_vocabularies(const Corpus& corpus, int min_freq = 1,
                                                     WordNorm norm = WordNorm::LowerDigits);

void assign_ids(Corpus& corpus, const Vocabulary& words, const Vocabulary& chars,
                WordNorm norm = WordNorm::LowerDigits);

struct CorpusStats {
    std::size_t sentences = 0;
    std::size_t mentions = 0;
    std::vector<std::size_t> per_class;
};

CorpusStats corpus_stats(const Corpus& corpus, const TagSet& tagset);

// Gold mention spans of one sentence: (start, end inclusive, class).
struct Mention {
    int start;
    int end;
    int cls;
    bool operator==(const Mention& o) const {
        return start == o.start && end == o.end && cls == o.cls;
    }
};
std::vector<Mention> gold_mentions(const std::vector<int>& tags, const TagSet& tagset);

// Collapse every entity class to DISEASE; span boundaries are untouched.
std::pair<Corpus, TagSet> flatten_to_task_a(const Corpus& corpus, const TagSet& tagset_b);

} // namespace seqtag
