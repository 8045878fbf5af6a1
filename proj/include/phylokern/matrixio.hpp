#ifndef PHYLOKERN_MATRIXIO_HPP
#define PHYLOKERN_MATRIXIO_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace phylokern::matrixio {

// Square matrix with one id per row/column. Used for S matrices (OTU ids,
// magic "PKS1") and sample-level kernel/distance matrices (sample ids,
// magic "PKK1").
struct LabeledMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};

inline constexpr std::array<char, 4> kSimilarityMagic = {'P', 'K', 'S', '1'};
inline constexpr std::array<char, 4> kKernelMagic = {'P', 'K', 'K', '1'};

// TSV: ids across the header (after a corner label) and down the first
// column; doubles printed with %.17g so values round-trip exactly.
std::string to_tsv(const LabeledMatrix& m, const std::string& corner);
LabeledMatrix from_tsv(std::istream& in);

// Binary container: magic, u64 dimension, id table (u32 length + bytes
// each), then the row-major little-endian f64 payload.
void write_binary(std::ostream& out, const LabeledMatrix& m, std::array<char, 4> magic);
LabeledMatrix read_binary(std::istream& in, std::array<char, 4> expected_magic);

// Writes TSV or binary depending on `binary`; reads either, sniffing the
// magic bytes.
void save(const std::string& path, const LabeledMatrix& m, std::array<char, 4> magic,
          const std::string& corner, bool binary);
LabeledMatrix load(const std::string& path);

}  // namespace phylokern::matrixio

#endif  // PHYLOKERN_MATRIXIO_HPP
