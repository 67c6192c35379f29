#include "revsynth/index_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "revsynth/errors.hpp"

namespace revsynth {

namespace {

constexpr char kMagic[8] = {'R', 'S', 'I', 'D', 'X', '0', '0', '1'};

void write_string(std::ostream& out, const std::string& s) {
    write_varint(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    std::uint64_t len = read_varint(in);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw data_error("truncated index file");
    return s;
}

void write_f64(std::ostream& out, double v) {
    static_assert(sizeof(double) == 8);
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.write(buf, 8);
}

double read_f64(std::istream& in) {
    char buf[8];
    in.read(buf, 8);
    if (!in) throw data_error("truncated index file");
    double v;
    std::memcpy(&v, buf, 8);
    return v;
}

} // namespace

void write_varint(std::ostream& out, std::uint64_t value) {
    while (value >= 0x80) {
        out.put(static_cast<char>((value & 0x7F) | 0x80));
        value >>= 7;
    }
    out.put(static_cast<char>(value));
}

std::uint64_t read_varint(std::istream& in) {
    std::uint64_t value = 0;
    int shift = 0;
    while (true) {
        int byte = in.get();
        if (byte == std::istream::traits_type::eof()) {
            throw data_error("truncated varint");
        }
        value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
        if ((byte & 0x80) == 0) break;
        shift += 7;
        if (shift >= 64) throw data_error("varint overflow");
    }
    return value;
}

void save_index(const InvertedIndex& index, std::ostream& out) {
    if (!index.frozen()) throw std::logic_error("only a frozen index can be saved");
    out.write(kMagic, sizeof(kMagic));

    const auto& docs = index.docs();
    write_varint(out, docs.size());
    for (const auto& [doc_id, meta] : docs) {
        write_varint(out, doc_id);
        write_string(out, meta.app_id);
        out.put(meta.kind == DocKind::review ? 0 : 1);
        write_varint(out, meta.tokens.size());
        for (const auto& tok : meta.tokens) write_string(out, tok);
    }

    const auto& terms = index.terms();
    write_varint(out, terms.size());
    for (const auto& [term, list] : terms) {
        write_string(out, term);
        const auto& postings = list.postings();
        write_varint(out, postings.size());
        std::uint32_t prev = 0;
        for (const auto& p : postings) {
            write_varint(out, p.doc_id - prev);
            write_varint(out, p.term_freq);
            prev = p.doc_id;
        }
    }
    write_f64(out, index.avgdl());
}

void save_index(const InvertedIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open " + path + " for writing");
    save_index(index, out);
    if (!out) throw data_error("failed writing " + path);
}

InvertedIndex load_index(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
        throw data_error("not an index file (bad magic)");
    }

    InvertedIndex index;
    std::uint64_t doc_count = read_varint(in);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        std::uint32_t doc_id = static_cast<std::uint32_t>(read_varint(in));
        std::string app_id = read_string(in);
        int kind_byte = in.get();
        if (kind_byte == std::istream::traits_type::eof()) throw data_error("truncated index file");
        DocKind kind = kind_byte == 0 ? DocKind::review : DocKind::description;
        std::uint64_t tok_count = read_varint(in);
        std::vector<std::string> tokens;
        tokens.reserve(tok_count);
        for (std::uint64_t t = 0; t < tok_count; ++t) tokens.push_back(read_string(in));
        index.add_document(doc_id, app_id, kind, tokens);
    }

    // Postings are rebuilt by freeze() from the docs; read the stored term
    // section to validate the file, then cross-check term count.
    std::uint64_t term_count = read_varint(in);
    for (std::uint64_t i = 0; i < term_count; ++i) {
        read_string(in);
        std::uint64_t postings = read_varint(in);
        for (std::uint64_t p = 0; p < postings; ++p) {
            read_varint(in);
            read_varint(in);
        }
    }
    double stored_avgdl = read_f64(in);

    index.freeze();
    if (index.terms().size() != term_count) {
        throw data_error("index file term dictionary does not match documents");
    }
    if (std::abs(index.avgdl() - stored_avgdl) > 1e-9) {
        throw data_error("index file avgdl does not match documents");
    }
    return index;
}

InvertedIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path);
    return load_index(in);
}

} // namespace revsynth
