#ifndef AHLP_CORE_HPP
#define AHLP_CORE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ahlp
{

using Real = double;
using Index = std::int32_t;

/// Sentinel for unbounded values. Bounds never hold NaN, so comparisons
/// against kInf / -kInf form a total order.
inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

inline bool is_finite( Real v ) { return v > -kInf && v < kInf; }

/// Raised when a collective sequence diverges between ranks.
class ProtocolFault : public std::runtime_error
{
 public:
   ProtocolFault( int rank, std::uint64_t call_index, std::string call_type,
                  const std::string& what )
       : std::runtime_error( "protocol fault on rank " + std::to_string( rank ) +
                             " at collective #" + std::to_string( call_index ) +
                             " (" + call_type + "): " + what ),
         rank_( rank ), call_index_( call_index ), call_type_( std::move( call_type ) )
   {
   }

   int rank() const { return rank_; }
   std::uint64_t call_index() const { return call_index_; }
   const std::string& call_type() const { return call_type_; }

 private:
   int rank_;
   std::uint64_t call_index_;
   std::string call_type_;
};

/// A caller broke an operation precondition (e.g. widening a bound).
class ContractViolation : public std::logic_error
{
 public:
   using std::logic_error::logic_error;
};

/// Postsolve replay met an entry it cannot apply.
class StackCorruption : public std::runtime_error
{
 public:
   using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error
{
 public:
   ParseError( const std::string& file, int line, const std::string& msg )
       : std::runtime_error( file + ":" + std::to_string( line ) + ": " + msg ), line_( line )
   {
   }
   int line() const { return line_; }

 private:
   int line_;
};

class InvalidProblem : public std::runtime_error
{
 public:
   using std::runtime_error::runtime_error;
};

} // namespace ahlp

#endif
