#ifndef AHLP_TRACKING_EXACT_SUM_HPP
#define AHLP_TRACKING_EXACT_SUM_HPP

#include "ahlp/core.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

namespace ahlp
{

/// Exact accumulator for sums of doubles (a fixed-point "long accumulator").
///
/// The value is a two's-complement integer scaled by 2^-1126, wide enough for
/// every finite double plus 64 bits of carry headroom. Additions and
/// subtractions are exact, so the rounded value depends only on the multiset
/// of terms, never on their order.
class ExactSum
{
 public:
   static constexpr int kLimbs = 35;
   static constexpr int kBias = 1126;

   ExactSum() { limbs_.fill( 0 ); }
   explicit ExactSum( Real v ) : ExactSum() { add( v ); }

   void add( Real v )
   {
      if( v == 0.0 )
         return;
      int exp = 0;
      const Real frac = std::frexp( std::fabs( v ), &exp );
      const auto mant = static_cast<std::uint64_t>( std::ldexp( frac, 53 ) );
      const int shift = exp - 53 + kBias;
      const int limb = shift / 64;
      const int off = shift % 64;
      const std::uint64_t lo = mant << off;
      const std::uint64_t hi = off ? mant >> ( 64 - off ) : 0;
      if( v > 0 )
         add_at( limb, lo, hi );
      else
         sub_at( limb, lo, hi );
   }

   void subtract( Real v ) { add( -v ); }

   ExactSum& operator+=( const ExactSum& o )
   {
      unsigned carry = 0;
      for( int k = 0; k < kLimbs; ++k )
      {
         const std::uint64_t a = limbs_[k];
         const std::uint64_t s = a + o.limbs_[k];
         const unsigned c1 = s < a;
         const std::uint64_t t = s + carry;
         const unsigned c2 = t < s;
         limbs_[k] = t;
         carry = c1 | c2;
      }
      return *this;
   }

   ExactSum& operator-=( const ExactSum& o )
   {
      ExactSum neg = o;
      neg.negate();
      return *this += neg;
   }

   friend ExactSum operator+( ExactSum a, const ExactSum& b ) { return a += b; }
   friend ExactSum operator-( ExactSum a, const ExactSum& b ) { return a -= b; }

   bool is_zero() const
   {
      for( auto l : limbs_ )
         if( l )
            return false;
      return true;
   }

   bool negative() const { return limbs_[kLimbs - 1] >> 63; }

   /// Correctly rounded (nearest, ties to even) value of the exact sum.
   Real value() const
   {
      if( is_zero() )
         return 0.0;
      ExactSum mag = *this;
      const bool neg = negative();
      if( neg )
         mag.negate();
      int top = kLimbs - 1;
      while( mag.limbs_[top] == 0 )
         --top;
      const int msb = top * 64 + 63 - std::countl_zero( mag.limbs_[top] );
      const int low = msb - 63;
      std::uint64_t window = mag.bits_from( low );
      bool sticky = mag.any_below( low );
      std::uint64_t m = window >> 11;
      const std::uint64_t rem = window & 0x7FF;
      const bool round_up = rem > 0x400 || ( rem == 0x400 && ( sticky || ( m & 1 ) ) );
      int e = msb - 52;
      if( round_up )
      {
         ++m;
         if( m == ( std::uint64_t( 1 ) << 53 ) )
         {
            m >>= 1;
            ++e;
         }
      }
      const Real r = std::ldexp( static_cast<Real>( m ), e - kBias );
      return neg ? -r : r;
   }

   bool operator==( const ExactSum& ) const = default;

   const std::array<std::uint64_t, kLimbs>& limbs() const { return limbs_; }

 private:
   void negate()
   {
      for( auto& l : limbs_ )
         l = ~l;
      for( int k = 0; k < kLimbs; ++k )
         if( ++limbs_[k] != 0 )
            break;
   }

   void add_at( int limb, std::uint64_t lo, std::uint64_t hi )
   {
      std::uint64_t a = limbs_[limb];
      limbs_[limb] = a + lo;
      unsigned carry = limbs_[limb] < a;
      a = limbs_[limb + 1];
      std::uint64_t s = a + hi;
      unsigned c1 = s < a;
      limbs_[limb + 1] = s + carry;
      carry = c1 | ( limbs_[limb + 1] < s );
      for( int k = limb + 2; carry && k < kLimbs; ++k )
         carry = ++limbs_[k] == 0;
   }

   void sub_at( int limb, std::uint64_t lo, std::uint64_t hi )
   {
      std::uint64_t a = limbs_[limb];
      limbs_[limb] = a - lo;
      unsigned borrow = a < lo;
      a = limbs_[limb + 1];
      std::uint64_t d = a - hi;
      unsigned b1 = a < hi;
      limbs_[limb + 1] = d - borrow;
      borrow = b1 | ( d < borrow );
      for( int k = limb + 2; borrow && k < kLimbs; ++k )
         borrow = limbs_[k]-- == 0;
   }

   std::uint64_t bit( int pos ) const
   {
      if( pos < 0 )
         return 0;
      return ( limbs_[pos / 64] >> ( pos % 64 ) ) & 1;
   }

   /// 64 bits starting at bit `low` (bits below zero read as zero).
   std::uint64_t bits_from( int low ) const
   {
      if( low >= 0 )
      {
         const int limb = low / 64;
         const int off = low % 64;
         std::uint64_t w = limbs_[limb] >> off;
         if( off && limb + 1 < kLimbs )
            w |= limbs_[limb + 1] << ( 64 - off );
         return w;
      }
      return limbs_[0] << ( -low );
   }

   bool any_below( int low ) const
   {
      if( low <= 0 )
         return false;
      const int limb = low / 64;
      for( int k = 0; k < limb; ++k )
         if( limbs_[k] )
            return true;
      const int off = low % 64;
      return off && ( limbs_[limb] & ( ( std::uint64_t( 1 ) << off ) - 1 ) );
   }

   std::array<std::uint64_t, kLimbs> limbs_;
};

} // namespace ahlp

#endif
