#ifndef AHLP_PRESOLVE_SINGLETONS_HPP
#define AHLP_PRESOLVE_SINGLETONS_HPP

#include "ahlp/presolve/context.hpp"

#include <algorithm>

namespace ahlp
{

/// Bounds on x implied by d <= a x <= f.
inline std::pair<Real, Real> singleton_bounds( Real a, Real d, Real f )
{
   auto div = [a]( Real v ) { return is_finite( v ) ? v / a : ( ( v > 0 ) == ( a > 0 ) ? kInf : -kInf ); };
   return a > 0 ? std::pair{ div( d ), div( f ) } : std::pair{ div( f ), div( d ) };
}

/// Turns rows with one entry into column bounds.
inline void singleton_rows( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   const Real tol = ctx.cfg.feastol;
   auto visit = [&]( RowKey r ) {
      if( ctx.failed() || ctx.tracking.row_nnz( r ) != 1 )
         return;
      ColKey c{};
      Real a = 0;
      ws.for_row_entries( r, [&]( ColKey k, Real v ) {
         c = k;
         a = v;
      } );
      if( a == 0 || ( r.scope() == RowScope::Local && c.is_link() ) )
         return;
      const auto& row = ws.row( r );
      const auto& col = ws.col( c );
      auto [lo, hi] = singleton_bounds( a, row.lhs, row.rhs );
      Real nl = std::max( col.lower, lo ), nu = std::min( col.upper, hi );
      if( nl > nu + tol )
      {
         ctx.fail( PresolveStatus::Infeasible, "singleton row " + row.name + " contradicts the bounds of " + col.name );
         return;
      }
      if( nl > nu || row.equality )
      {
         const Real v = std::clamp( row.equality ? row.rhs / a : 0.5 * ( nl + nu ), col.lower, col.upper );
         nl = nu = v;
      }
      ctx.stack.push( SingletonRow{ row.gid, col.gid, a, col.lower, col.upper, nl, nu, row.equality,
                                    r.replicated(), c.is_link() } );
      ctx.remove_row( r );
      if( auto* t = ctx.count( c.is_link() ) )
         t->bounds_tightened += ( nl > col.lower ) + ( nu < col.upper );
      ctx.set_bounds( c, nl, nu );
      if( row.equality )
         ctx.fix_col( c, nl );
   };
   ws.for_rows( RowScope::Zero, visit );
   ws.for_rows( RowScope::Local, visit );
}

/// Substitutes implied-free columns that appear in a single equality row.
/// Candidates are local columns of local rows without x_0 entries and x_0
/// columns of replicated A_0 rows, so every rank applies the same changes to
/// replicated data.
inline void singleton_cols( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   auto visit = [&]( ColKey c ) {
      auto& col = ws.col( c );
      if( ctx.failed() || !col.alive || ctx.tracking.col_nnz( c ) != 1 )
         return;
      RowKey r{};
      Real a = 0;
      int seen = 0;
      ws.for_col_entries( c, [&]( RowKey k, Real v ) {
         r = k;
         a = v;
         ++seen;
      } );
      if( seen != 1 || a == 0 )
         return;
      const auto& row = ws.row( r );
      if( !row.equality )
         return;
      if( c.is_link() ? r.scope() != RowScope::Zero : r.scope() != RowScope::Local )
         return;
      bool mixed = false;
      ws.for_row_entries( r, [&]( ColKey k, Real ) { mixed = mixed || k.is_link() != c.is_link(); } );
      if( mixed )
         return;

      const auto& act = ctx.tracking.act( r );
      const Real rmin = act.residual_min( a, col.lower, col.upper );
      const Real rmax = act.residual_max( a, col.lower, col.upper );
      auto [lo, hi] = singleton_bounds( a, row.rhs - rmax, row.rhs - rmin );
      if( lo < col.lower || hi > col.upper )
         return;

      SubstitutedCol rec{ col.gid, row.gid, a, row.rhs, col.cost, r.replicated(), {} };
      const Real ratio = col.cost / a;
      ws.for_row_entries( r, [&]( ColKey k, Real v ) {
         if( k == c )
            return;
         auto& other = ws.col( k );
         rec.row_entries.push_back( { other.gid, v } );
         other.cost -= ratio * v;
      } );
      ( r.replicated() ? ws.offset_replicated : ws.offset_local ) += ratio * row.rhs;
      ctx.stack.push( std::move( rec ) );
      ctx.remove_row( r );
      ctx.tracking.on_col_removed( ws, c );
      col.alive = false;
      if( auto* t = ctx.count( c.is_link() ) )
         t->cols_deleted += 1;
   };
   for( Index j = 0; j < static_cast<Index>( ws.link_cols.size() ); ++j )
      visit( ColKey::link( j ) );
   for( Index j = 0; j < static_cast<Index>( ws.local_cols.size() ); ++j )
      visit( ColKey::local( j ) );
}

} // namespace ahlp

#endif
