#ifndef PXG_IO_HPP
#define PXG_IO_HPP

#include <string>
#include <vector>

#include "pxg/gibbs.hpp"

namespace pxg {

inline constexpr char kTraceMagic[8] = {'P', 'X', 'G', 'T', 'R', 'A', 'C', 'E'};
inline constexpr std::uint8_t kTraceVersion = 1;

void write_trace(const std::string& path, const TraceStore& trace);
TraceStore read_trace(const std::string& path);

/// Numeric CSV. A first row that does not parse as numbers is treated as a header.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& header);

/// 17 significant digits, round-trippable.
std::string format_double(double v);

} // namespace pxg

#endif
