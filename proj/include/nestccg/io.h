#ifndef NESTCCG_IO_H_
#define NESTCCG_IO_H_

#include <functional>
#include <iosfwd>
#include <string>

namespace nestccg {

// Writes through a sibling temporary file and renames it into place, so a
// failed writer leaves no partial output behind.
void write_file_atomic(const std::string& path, const std::function<void(std::ostream&)>& writer);

// %.17g: enough digits for an exact double round-trip.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace nestccg

#endif  // NESTCCG_IO_H_
