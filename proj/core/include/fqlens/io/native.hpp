// =============================================================================
// native.hpp - "FQL1" binary panel container.
//
// Layout (all integers little-endian):
//
//   magic        4 bytes   "FQL1"
//   n_hap        u64
//   n_loci       u64
//   alleles      n_hap × ⌈n_loci/8⌉ bytes, row-major; locus j of a row is
//                bit (j % 8) of byte (j / 8) (least significant bit first),
//                padding bits zero
//   haplotypes   n_hap × { str sample_id, u8 haplotype_index, str population }
//   loci         n_loci × { str chromosome, u64 position, str id }
//
//   str = u32 byte length followed by UTF-8 bytes
//
// Readers reject bad magic, truncated payloads, trailing bytes and counts
// whose byte size would overflow.
// =============================================================================
#pragma once

#include "fqlens/panel.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace fqlens::io {

inline constexpr char kNativeMagic[4] = {'F', 'Q', 'L', '1'};

void write_native(const HaplotypePanel& panel, std::ostream& out);
void write_native(const HaplotypePanel& panel, const std::filesystem::path& path);

/// Throws FormatError.
HaplotypePanel read_native(std::istream& in);
HaplotypePanel read_native(const std::filesystem::path& path);

/// True when the file starts with the FQL1 magic.
bool is_native_file(const std::filesystem::path& path);

}  // namespace fqlens::io
