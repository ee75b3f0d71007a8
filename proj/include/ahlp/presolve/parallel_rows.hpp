#ifndef AHLP_PRESOLVE_PARALLEL_ROWS_HPP
#define AHLP_PRESOLVE_PARALLEL_ROWS_HPP

#include "ahlp/presolve/context.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace ahlp
{

inline std::uint64_t splitmix64( std::uint64_t x )
{
   x += 0x9E3779B97F4A7C15ull;
   x = ( x ^ ( x >> 30 ) ) * 0xBF58476D1CE4E5B9ull;
   x = ( x ^ ( x >> 27 ) ) * 0x94D049BB133111EBull;
   return x ^ ( x >> 31 );
}

/// Alive entries of a row sorted by column key.
using RowSignature = std::vector<RowEntry>;

inline RowSignature row_signature( const Workspace& ws, RowKey r )
{
   RowSignature s;
   ws.for_row_entries( r, [&]( ColKey c, Real a ) { s.push_back( { c, a } ); } );
   std::sort( s.begin(), s.end(), []( const RowEntry& x, const RowEntry& y ) { return x.col < y.col; } );
   return s;
}

inline std::uint64_t support_hash( const RowSignature& s )
{
   std::uint64_t h = 0x51ED2701;
   for( const auto& e : s )
      h = splitmix64( h ^ e.col.v );
   return h;
}

/// Hash of the coefficients divided by the first one, rounded to single
/// precision so that proportional rows collide.
inline std::uint64_t coefficient_hash( const RowSignature& s )
{
   std::uint64_t h = 0xC0EFF;
   if( s.empty() )
      return h;
   const Real ref = s.front().val;
   for( const auto& e : s )
   {
      float q = static_cast<float>( e.val / ref );
      if( q == 0.0f )
         q = 0.0f;
      h = splitmix64( h ^ std::bit_cast<std::uint32_t>( q ) );
   }
   return h;
}

/// Ratio range of b over a across entries of two rows on the same support;
/// false when the supports differ. Empty signatures give (+inf, -inf).
inline bool ratio_range( const RowSignature& a, const RowSignature& b, Real& lo, Real& hi )
{
   lo = kInf;
   hi = -kInf;
   if( a.size() != b.size() )
      return false;
   for( std::size_t k = 0; k < a.size(); ++k )
   {
      if( a[k].col != b[k].col || a[k].val == 0 )
         return false;
      const Real r = b[k].val / a[k].val;
      lo = std::min( lo, r );
      hi = std::max( hi, r );
   }
   return true;
}

inline bool ratios_agree( Real lo, Real hi, Real tol )
{
   return is_finite( lo ) && is_finite( hi ) && hi - lo <= tol * ( 1 + std::fabs( lo ) );
}

/// Reduces rows l and k with row_k = lambda * row_l. One of them is deleted;
/// for two inequalities row l keeps the intersection of both ranges.
inline void reduce_parallel_pair( PresolveContext& ctx, RowKey l, RowKey k, Real lambda )
{
   auto& ws = ctx.ws;
   const Real tol = ctx.cfg.feastol;
   if( !ws.row( l ).equality && ws.row( k ).equality )
   {
      std::swap( l, k );
      lambda = 1 / lambda;
   }
   auto& kept = ws.row( l );
   const auto& gone = ws.row( k );
   const bool replicated = l.replicated();
   if( kept.equality )
   {
      const Real v = lambda * kept.rhs;
      const bool ok = gone.equality ? std::fabs( gone.rhs - v ) <= tol * ( 1 + std::fabs( gone.rhs ) )
                                    : v >= gone.lhs - tol && v <= gone.rhs + tol;
      if( !ok )
      {
         ctx.fail( PresolveStatus::Infeasible, "parallel rows " + kept.name + " and " + gone.name + " conflict" );
         return;
      }
      ctx.stack.push( RedundantRow{ gone.gid, replicated } );
      ctx.remove_row( k );
      return;
   }
   auto scaled = [&]( Real v ) { return is_finite( v ) ? v / lambda : ( ( v > 0 ) == ( lambda > 0 ) ? kInf : -kInf ); };
   const Real lo = lambda > 0 ? scaled( gone.lhs ) : scaled( gone.rhs );
   const Real hi = lambda > 0 ? scaled( gone.rhs ) : scaled( gone.lhs );
   Real nd = std::max( kept.lhs, lo ), nf = std::min( kept.rhs, hi );
   if( nd > nf + tol )
   {
      ctx.fail( PresolveStatus::Infeasible, "parallel rows " + kept.name + " and " + gone.name + " conflict" );
      return;
   }
   if( nd > nf )
      nd = nf = 0.5 * ( nd + nf );
   ctx.stack.push( ParallelRow{ kept.gid, gone.gid, lambda, replicated, lo > kept.lhs, hi < kept.rhs, kept.lhs,
                                kept.rhs } );
   kept.lhs = nd;
   kept.rhs = nf;
   ctx.remove_row( k );
}

namespace detail
{

   /// Bucket scan over rows with known signatures; identical input gives
   /// identical reductions on every rank.
   inline void reduce_parallel_group( PresolveContext& ctx, const std::vector<RowKey>& rows )
   {
      struct Item
      {
         std::uint64_t support, coef;
         RowKey key;
         RowSignature sig;
      };
      std::vector<Item> items;
      for( RowKey r : rows )
      {
         auto sig = row_signature( ctx.ws, r );
         if( sig.empty() )
            continue;
         items.push_back( { support_hash( sig ), coefficient_hash( sig ), r, std::move( sig ) } );
      }
      std::stable_sort( items.begin(), items.end(), []( const Item& a, const Item& b ) {
         return std::tie( a.support, a.coef ) < std::tie( b.support, b.coef );
      } );
      for( std::size_t s = 0; s < items.size() && !ctx.failed(); )
      {
         std::size_t e = s;
         while( e < items.size() && items[e].support == items[s].support && items[e].coef == items[s].coef )
            ++e;
         for( std::size_t k = s + 1; k < e && !ctx.failed(); ++k )
            for( std::size_t l = s; l < k; ++l )
            {
               if( !ctx.ws.row( items[l].key ).alive || !ctx.ws.row( items[k].key ).alive )
                  continue;
               Real lo, hi;
               if( ratio_range( items[l].sig, items[k].sig, lo, hi ) && ratios_agree( lo, hi, ctx.cfg.parallel_tol ) )
               {
                  reduce_parallel_pair( ctx, items[l].key, items[k].key, lo );
                  break;
               }
            }
         s = e;
      }
   }

} // namespace detail

struct RowPair
{
   Index first;
   Index second;
   Real lambda; ///< row second = lambda * row first
};

/// Hash-based detection of all parallel pairs i < j among the rows of `m`.
inline std::vector<RowPair> find_parallel_rows( const SparseMatrix& m, Real tol )
{
   struct Item
   {
      std::uint64_t support, coef;
      Index row;
      RowSignature sig;
   };
   std::vector<Item> items;
   for( Index i = 0; i < m.rows(); ++i )
   {
      RowSignature sig;
      const auto cols = m.row_cols( i );
      const auto vals = m.row_vals( i );
      for( std::size_t k = 0; k < cols.size(); ++k )
         sig.push_back( { ColKey::link( cols[k] ), vals[k] } );
      if( sig.empty() )
         continue;
      items.push_back( { support_hash( sig ), coefficient_hash( sig ), i, std::move( sig ) } );
   }
   std::stable_sort( items.begin(), items.end(), []( const Item& a, const Item& b ) {
      return std::tie( a.support, a.coef ) < std::tie( b.support, b.coef );
   } );
   std::vector<RowPair> out;
   for( std::size_t s = 0; s < items.size(); )
   {
      std::size_t e = s;
      while( e < items.size() && items[e].support == items[s].support && items[e].coef == items[s].coef )
         ++e;
      for( std::size_t a = s; a < e; ++a )
         for( std::size_t b = a + 1; b < e; ++b )
         {
            Real lo, hi;
            if( ratio_range( items[a].sig, items[b].sig, lo, hi ) && ratios_agree( lo, hi, tol ) )
               out.push_back( { items[a].row, items[b].row, lo } );
         }
      s = e;
   }
   for( auto& p : out )
      if( p.first > p.second )
      {
         std::swap( p.first, p.second );
         p.lambda = 1 / p.lambda;
      }
   std::sort( out.begin(), out.end(),
              []( const RowPair& a, const RowPair& b ) { return std::tie( a.first, a.second ) < std::tie( b.first, b.second ); } );
   return out;
}

/// Parallel rows among A_0 / C_0 rows and within each local block.
inline void parallel_rows_local( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   std::vector<RowKey> zero;
   ws.for_rows( RowScope::Zero, [&]( RowKey r ) { zero.push_back( r ); } );
   detail::reduce_parallel_group( ctx, zero );
   std::map<int, std::vector<RowKey>> by_block;
   ws.for_rows( RowScope::Local, [&]( RowKey r ) { by_block[ws.row( r ).block].push_back( r ); } );
   for( const auto& [b, rows] : by_block )
      detail::reduce_parallel_group( ctx, rows );
}

/// Parallel linking rows. Each rank hashes the part of a row it holds (x_0
/// entries count on rank 0 only); partial hashes are combined by wrapping
/// addition. Candidate pairs in equal-hash buckets are checked locally and
/// the verdicts combined as (AND, min ratio, max ratio).
inline void parallel_rows_linking( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   auto& comm = *ctx.comm;
   const std::size_t m = ws.link_rows.size();
   const std::string tag = "parallel-linking:" + std::to_string( m );

   std::vector<RowSignature> sig( m );
   std::vector<std::uint64_t> hash( m, 0 );
   for( std::size_t i = 0; i < m; ++i )
   {
      const RowKey r = RowKey::make( RowScope::Link, static_cast<Index>( i ) );
      if( !ws.row( r ).alive )
         continue;
      for( const auto& e : row_signature( ws, r ) )
         if( e.col.is_local() || ctx.root() )
         {
            sig[i].push_back( { ColKey{ static_cast<std::uint32_t>( ws.col( e.col ).gid ) }, e.val } );
            hash[i] += splitmix64( ws.col( e.col ).gid );
         }
      std::sort( sig[i].begin(), sig[i].end(), []( const RowEntry& x, const RowEntry& y ) { return x.col < y.col; } );
   }
   hash = comm.allreduce( hash, ops::wrapping_add(), tag );

   std::vector<std::size_t> order;
   for( std::size_t i = 0; i < m; ++i )
      if( ws.link_rows[i].alive && ctx.tracking.row_nnz( RowKey::make( RowScope::Link, static_cast<Index>( i ) ) ) > 0 )
         order.push_back( i );
   std::stable_sort( order.begin(), order.end(), [&]( std::size_t a, std::size_t b ) { return hash[a] < hash[b]; } );
   std::vector<std::pair<std::size_t, std::size_t>> pairs;
   for( std::size_t s = 0; s < order.size(); )
   {
      std::size_t e = s;
      while( e < order.size() && hash[order[e]] == hash[order[s]] )
         ++e;
      for( std::size_t k = s + 1; k < e; ++k )
         for( std::size_t l = s; l < k; ++l )
            pairs.push_back( { order[l], order[k] } );
      s = e;
   }

   std::vector<std::uint8_t> par( pairs.size(), 1 );
   std::vector<Real> lo( pairs.size() ), hi( pairs.size() );
   for( std::size_t p = 0; p < pairs.size(); ++p )
      par[p] = ratio_range( sig[pairs[p].first], sig[pairs[p].second], lo[p], hi[p] );
   par = comm.allreduce( par, ops::logical_and(), tag );
   lo = comm.allreduce( lo, ops::min<Real>(), tag );
   hi = comm.allreduce( hi, ops::max<Real>(), tag );

   for( std::size_t p = 0; p < pairs.size() && !ctx.failed(); ++p )
   {
      const RowKey l = RowKey::make( RowScope::Link, static_cast<Index>( pairs[p].first ) );
      const RowKey k = RowKey::make( RowScope::Link, static_cast<Index>( pairs[p].second ) );
      if( !par[p] || !ws.row( l ).alive || !ws.row( k ).alive || !ratios_agree( lo[p], hi[p], ctx.cfg.parallel_tol ) )
         continue;
      reduce_parallel_pair( ctx, l, k, lo[p] );
   }
}

} // namespace ahlp

#endif
