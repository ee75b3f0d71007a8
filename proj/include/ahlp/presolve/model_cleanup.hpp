#ifndef AHLP_PRESOLVE_MODEL_CLEANUP_HPP
#define AHLP_PRESOLVE_MODEL_CLEANUP_HPP

#include "ahlp/presolve/context.hpp"

#include <optional>

namespace ahlp
{

/// Value at which an empty column is optimal, or nullopt when the objective
/// improves without bound.
inline std::optional<Real> empty_col_value( Real cost, Real l, Real u )
{
   if( cost > 0 )
      return is_finite( l ) ? std::optional<Real>( l ) : std::nullopt;
   if( cost < 0 )
      return is_finite( u ) ? std::optional<Real>( u ) : std::nullopt;
   return clamp_zero( l, u );
}

namespace detail
{

   inline bool has_link_col( const Workspace& ws, RowKey r )
   {
      bool found = false;
      ws.for_row_entries( r, [&]( ColKey c, Real ) { found = found || c.is_link(); } );
      return found;
   }

   inline void force_row( PresolveContext& ctx, RowKey r, bool at_min )
   {
      auto& ws = ctx.ws;
      const auto& row = ws.row( r );
      ForcingRow rec;
      rec.row = row.gid;
      rec.at_min = at_min;
      rec.equality = row.equality;
      rec.replicated = r.replicated();
      rec.collective = r.scope() == RowScope::Link;
      std::vector<std::pair<ColKey, Real>> fixes;
      ws.for_row_entries( r, [&]( ColKey c, Real a ) {
         const auto& col = ws.col( c );
         const Real v = ( a > 0 ) == at_min ? col.lower : col.upper;
         rec.cols.push_back( { col.gid, a, v, col.cost, c.is_link() } );
         fixes.push_back( { c, v } );
      } );
      ctx.stack.push( std::move( rec ) );
      ctx.remove_row( r );
      for( auto [c, v] : fixes )
         ctx.fix_and_remove_col( c, v );
   }

} // namespace detail

/// Empty columns, redundant rows, and forcing rows.
inline void model_cleanup( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   const Real tol = ctx.cfg.feastol;

   auto empty_cols = [&]( bool local ) {
      auto& cols = local ? ws.local_cols : ws.link_cols;
      for( Index j = 0; j < static_cast<Index>( cols.size() ) && !ctx.failed(); ++j )
      {
         const ColKey c = local ? ColKey::local( j ) : ColKey::link( j );
         if( !cols[j].alive || ctx.tracking.col_nnz( c ) != 0 )
            continue;
         const auto v = empty_col_value( cols[j].cost, cols[j].lower, cols[j].upper );
         if( !v )
         {
            ctx.fail( PresolveStatus::Unbounded, "empty column " + cols[j].name + " improves without bound" );
            return;
         }
         ctx.fix_col( c, *v );
      }
   };
   empty_cols( false );
   empty_cols( true );

   bool link_forced = false;
   auto visit = [&]( RowKey r ) {
      if( ctx.failed() )
         return;
      const auto& row = ws.row( r );
      const auto& act = ctx.tracking.act( r );
      const Real lo = act.min(), hi = act.max();
      if( lo > row.rhs + tol || hi < row.lhs - tol )
      {
         ctx.fail( PresolveStatus::Infeasible, "activity of row " + row.name + " lies outside its sides" );
         return;
      }
      if( !row.equality && lo >= row.lhs - tol && hi <= row.rhs + tol )
      {
         ctx.stack.push( RedundantRow{ row.gid, r.replicated() } );
         ctx.remove_row( r );
         return;
      }
      if( r.scope() == RowScope::Local && detail::has_link_col( ws, r ) )
         return;
      if( r.scope() == RowScope::Link && link_forced )
         return;
      const bool at_min = is_finite( lo ) && std::fabs( lo - row.rhs ) <= tol;
      const bool at_max = is_finite( hi ) && std::fabs( hi - row.lhs ) <= tol;
      if( !at_min && !at_max )
         return;
      link_forced = link_forced || r.scope() == RowScope::Link;
      detail::force_row( ctx, r, at_min );
   };
   ws.for_rows( RowScope::Link, visit );
   ws.for_rows( RowScope::Zero, visit );
   ws.for_rows( RowScope::Local, visit );
}

} // namespace ahlp

#endif
