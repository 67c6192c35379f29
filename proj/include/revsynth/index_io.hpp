#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "revsynth/index.hpp"

namespace revsynth {

// Little-endian binary index format. Postings store delta-encoded doc ids and
// term frequencies as LEB128 varints; the term dictionary is written in sorted
// order, so saving the same frozen index twice produces identical bytes.
void save_index(const InvertedIndex& index, std::ostream& out);
void save_index(const InvertedIndex& index, const std::string& path);

InvertedIndex load_index(std::istream& in);
InvertedIndex load_index(const std::string& path);

// Exposed for tests.
void write_varint(std::ostream& out, std::uint64_t value);
std::uint64_t read_varint(std::istream& in);

} // namespace revsynth
