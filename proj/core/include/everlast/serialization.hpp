#pragma once

#include <iosfwd>
#include <string>

#include "everlast/core.hpp"

// Line-oriented CSV formats for distributions, queries and datasets.
// Each file starts with a header comment naming the kind and version,
// followed by a column line and one record per domain element:
//
//   # everlast distribution v1
//   element,probability
//   a,0.25
//
//   # everlast query v1 id=q1
//   element,value
//   a,0.2
//
//   # everlast dataset v1
//   element,count
//   a,3
//
// Full description in docs/formats.md.
namespace everlast::io {

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

void write_distribution(std::ostream& out, const Distribution& dist);
/// Builds a fresh domain from the element column. Labels "0".."D-1" in order
/// produce an integer domain.
Distribution read_distribution(std::istream& in);

void write_query(std::ostream& out, const Query& q);
/// Every element of `domain` must appear exactly once.
Query read_query(std::istream& in, DomainPtr domain);

void write_dataset(std::ostream& out, const Dataset& d);
/// Samples are expanded in domain order (a dataset is a multiset).
Dataset read_dataset(std::istream& in, DomainPtr domain);

}  // namespace everlast::io
