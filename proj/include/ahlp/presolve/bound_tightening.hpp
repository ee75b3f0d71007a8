#ifndef AHLP_PRESOLVE_BOUND_TIGHTENING_HPP
#define AHLP_PRESOLVE_BOUND_TIGHTENING_HPP

#include "ahlp/presolve/context.hpp"

#include <climits>
#include <cmath>

namespace ahlp
{

/// Smallest bound change worth applying to a column with bounds [l, u].
inline Real tightening_threshold( Real l, Real u, Real old_bound )
{
   const Real range = is_finite( l ) && is_finite( u ) ? u - l : std::fabs( old_bound );
   return 1e-3 * std::max<Real>( 1, range );
}

/// New bounds on column c implied by a row with sides [d, f] whose activity
/// without c ranges over [rmin, rmax]; infinite results mean no implication.
inline std::pair<Real, Real> implied_bounds( Real a, Real d, Real f, Real rmin, Real rmax )
{
   Real lo = -kInf, hi = kInf;
   if( is_finite( f ) && is_finite( rmin ) )
      ( a > 0 ? hi : lo ) = ( f - rmin ) / a;
   if( is_finite( d ) && is_finite( rmax ) )
      ( a > 0 ? lo : hi ) = ( d - rmax ) / a;
   return { lo, hi };
}

namespace detail
{

   struct Proposal
   {
      Real value;
      std::int64_t row = -1;
      Real a = 0;
   };

} // namespace detail

/// Activity-based bound tightening over single rows.
///
/// Replicated rows tighten x_0 columns identically on every rank. Local rows
/// tighten local columns in place; their x_0 implications are merged over
/// ranks at the end (max of lower, min of upper bounds, lowest rank wins ties).
/// Local columns are never tightened from linking rows.
inline void bound_tightening( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   const Real tol = ctx.cfg.feastol;
   const std::size_t n0 = ws.link_cols.size();
   std::vector<detail::Proposal> prop_lo( n0, { -kInf } ), prop_up( n0, { kInf } );

   auto apply = [&]( ColKey c, bool upper, Real v, std::int64_t row_gid, Real a, bool row_replicated ) {
      auto& col = ws.col( c );
      const Real old = upper ? col.upper : col.lower;
      if( upper ? v > col.lower - tol && v < col.lower : v < col.upper + tol && v > col.upper )
         v = upper ? col.lower : col.upper;
      if( upper ? v < col.lower : v > col.upper )
      {
         ctx.fail( PresolveStatus::Infeasible, "implied bounds of column " + col.name + " cross" );
         return;
      }
      ctx.stack.push( BoundTightened{ col.gid, row_gid, a, upper, old, v, c.is_link(), row_replicated } );
      if( auto* t = ctx.count( c.is_link() ) )
         t->bounds_tightened += 1;
      if( upper )
         ctx.set_bounds( c, col.lower, v );
      else
         ctx.set_bounds( c, v, col.upper );
   };
   auto improves = [&]( const WorkCol& col, bool upper, Real v ) {
      const Real old = upper ? col.upper : col.lower;
      if( !is_finite( v ) )
         return false;
      if( !is_finite( old ) )
         return true;
      const Real gain = upper ? old - v : v - old;
      return gain > tightening_threshold( col.lower, col.upper, old );
   };

   auto visit = [&]( RowKey r ) {
      if( ctx.failed() )
         return;
      const auto& row = ws.row( r );
      std::vector<std::pair<ColKey, Real>> entries;
      ws.for_row_entries( r, [&]( ColKey c, Real a ) { entries.push_back( { c, a } ); } );
      for( auto [c, a] : entries )
      {
         if( ctx.failed() || std::fabs( a ) < 1e-9 || ( c.is_local() && r.scope() == RowScope::Link ) )
            continue;
         const auto& col = ws.col( c );
         const auto& act = ctx.tracking.act( r );
         auto [lo, hi] = implied_bounds( a, row.lhs, row.rhs, act.residual_min( a, col.lower, col.upper ),
                                         act.residual_max( a, col.lower, col.upper ) );
         const bool deferred = c.is_link() && r.scope() == RowScope::Local;
         for( bool upper : { false, true } )
         {
            const Real v = upper ? hi : lo;
            if( !improves( col, upper, v ) )
               continue;
            if( deferred )
            {
               auto& p = ( upper ? prop_up : prop_lo )[c.index()];
               if( upper ? v < p.value : v > p.value )
                  p = { v, row.gid, a };
            }
            else
               apply( c, upper, v, row.gid, a, r.replicated() );
         }
      }
   };
   ws.for_rows( RowScope::Zero, visit );
   ws.for_rows( RowScope::Link, visit );
   ws.for_rows( RowScope::Local, visit );

   auto& comm = *ctx.comm;
   const std::string tag = "bound-tightening:" + std::to_string( n0 );
   std::vector<Real> lo( n0 ), up( n0 );
   for( std::size_t j = 0; j < n0; ++j )
   {
      lo[j] = prop_lo[j].value;
      up[j] = prop_up[j].value;
   }
   lo = comm.allreduce( lo, ops::max<Real>(), tag );
   up = comm.allreduce( up, ops::min<Real>(), tag );
   std::vector<int> winner( 2 * n0, INT_MAX );
   for( std::size_t j = 0; j < n0; ++j )
   {
      if( is_finite( lo[j] ) && prop_lo[j].value == lo[j] )
         winner[2 * j] = ws.rank;
      if( is_finite( up[j] ) && prop_up[j].value == up[j] )
         winner[2 * j + 1] = ws.rank;
   }
   winner = comm.allreduce( winner, ops::min<int>(), tag );
   std::vector<std::int64_t> rows( 2 * n0, 0 );
   std::vector<Real> coefs( 2 * n0, 0 );
   for( std::size_t k = 0; k < 2 * n0; ++k )
      if( winner[k] == ws.rank )
      {
         const auto& p = k % 2 ? prop_up[k / 2] : prop_lo[k / 2];
         rows[k] = p.row;
         coefs[k] = p.a;
      }
   rows = comm.allreduce( rows, ops::sum<std::int64_t>(), tag );
   coefs = comm.allreduce( coefs, ops::sum<Real>(), tag );
   for( std::size_t k = 0; k < 2 * n0 && !ctx.failed(); ++k )
   {
      if( winner[k] == INT_MAX )
         continue;
      const ColKey c = ColKey::link( static_cast<Index>( k / 2 ) );
      const bool upper = k % 2;
      const Real v = upper ? up[k / 2] : lo[k / 2];
      if( ws.col( c ).alive && improves( ws.col( c ), upper, v ) )
         apply( c, upper, v, rows[k], coefs[k], false );
   }
}

} // namespace ahlp

#endif
