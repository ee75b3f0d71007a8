#ifndef AHLP_PRESOLVE_TINY_ENTRIES_HPP
#define AHLP_PRESOLVE_TINY_ENTRIES_HPP

#include "ahlp/presolve/context.hpp"

#include <cmath>

namespace ahlp
{

/// True when dropping entry a of a column with bounds [l, u] changes any row
/// activity by at most 0.01 * feastol.
inline bool is_tiny_entry( Real a, Real l, Real u, Real tiny_tol, Real feastol )
{
   if( std::fabs( a ) > tiny_tol || !is_finite( l ) || !is_finite( u ) )
      return false;
   const Real scale = std::max( { std::fabs( l ), std::fabs( u ), u - l } );
   return std::fabs( a ) * scale <= 0.01 * feastol;
}

/// Removes tiny matrix entries. No postsolve record: the removal is a
/// relaxation within the feasibility tolerance.
inline void tiny_entries( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   std::vector<std::pair<RowKey, ColKey>> doomed;
   ws.for_all_rows( [&]( RowKey r ) {
      ws.for_row_entries( r, [&]( ColKey c, Real a ) {
         const auto& col = ws.col( c );
         if( is_tiny_entry( a, col.lower, col.upper, ctx.cfg.tiny_tol, ctx.cfg.feastol ) )
            doomed.push_back( { r, c } );
      } );
   } );
   for( auto [r, c] : doomed )
   {
      ctx.tracking.on_entry_removed( ws, r, c, ws.coef( r, c ) );
      ws.erase_entry( r, c );
      if( auto* t = ctx.count( r.replicated() && c.is_link() ) )
         t->entries_deleted += 1;
   }
}

} // namespace ahlp

#endif
