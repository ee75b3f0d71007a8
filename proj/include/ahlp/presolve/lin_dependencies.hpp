#ifndef AHLP_PRESOLVE_LIN_DEPENDENCIES_HPP
#define AHLP_PRESOLVE_LIN_DEPENDENCIES_HPP

#include "ahlp/presolve/context.hpp"

#include <cmath>
#include <map>

namespace ahlp
{

/// Sparse row of an elimination: pivot-column part and the weights of the
/// original rows that form it.
struct ElimRow
{
   std::map<Index, Real> part;
   std::map<Index, Real> weights;
};

/// Gaussian elimination on rows over columns [0, n) with Markowitz ordering
/// and threshold pivoting (|pivot| >= threshold * column max). Entries below
/// zero_tol times the original row maximum count as zero. Returns, for every
/// row that eliminates to zero, its index and the combination weights.
inline std::vector<std::pair<Index, std::map<Index, Real>>> eliminate_dependent(
    std::vector<std::map<Index, Real>> rows, Real threshold, Real zero_tol )
{
   const Index m = static_cast<Index>( rows.size() );
   std::vector<ElimRow> work( m );
   std::vector<Real> scale( m, 0 );
   for( Index i = 0; i < m; ++i )
   {
      for( auto [j, v] : rows[i] )
         scale[i] = std::max( scale[i], std::fabs( v ) );
      for( auto [j, v] : rows[i] )
         if( std::fabs( v ) > zero_tol * scale[i] )
            work[i].part[j] = v;
      work[i].weights[i] = 1;
   }
   std::vector<char> active( m, 1 );
   while( true )
   {
      std::map<Index, std::pair<Index, Real>> col_stats; // count, max
      for( Index i = 0; i < m; ++i )
         if( active[i] )
            for( auto [j, v] : work[i].part )
            {
               auto& s = col_stats[j];
               s.first += 1;
               s.second = std::max( s.second, std::fabs( v ) );
            }
      Index pr = -1, pc = -1;
      std::int64_t best = -1;
      for( Index i = 0; i < m; ++i )
      {
         if( !active[i] )
            continue;
         const std::int64_t rc = static_cast<std::int64_t>( work[i].part.size() ) - 1;
         for( auto [j, v] : work[i].part )
         {
            const auto& s = col_stats[j];
            if( std::fabs( v ) < threshold * s.second )
               continue;
            const std::int64_t cost = rc * ( s.first - 1 );
            if( best < 0 || cost < best )
            {
               best = cost;
               pr = i;
               pc = j;
            }
         }
      }
      if( pr < 0 )
         break;
      active[pr] = 0;
      const Real piv = work[pr].part.at( pc );
      for( Index k = 0; k < m; ++k )
      {
         if( !active[k] )
            continue;
         auto it = work[k].part.find( pc );
         if( it == work[k].part.end() )
            continue;
         const Real mult = it->second / piv;
         for( auto [j, v] : work[pr].part )
         {
            Real& t = work[k].part[j];
            t -= mult * v;
            if( j == pc || std::fabs( t ) <= zero_tol * scale[k] )
               work[k].part.erase( j );
         }
         for( auto [j, v] : work[pr].weights )
         {
            Real& t = work[k].weights[j];
            t -= mult * v;
            if( t == 0 )
               work[k].weights.erase( j );
         }
      }
   }
   std::vector<std::pair<Index, std::map<Index, Real>>> out;
   for( Index i = 0; i < m; ++i )
      if( active[i] )
         out.push_back( { i, std::move( work[i].weights ) } );
   return out;
}

namespace detail
{

   struct CombinedRow
   {
      std::int64_t p;
      int owner;
      std::string name;
      Real rhs;
      std::vector<std::pair<Index, Real>> entries; ///< linking column index, value
   };

} // namespace detail

/// Removes linearly dependent equality rows. Each block eliminates its
/// equality rows over its own columns; a row that vanishes there is either
/// dropped (its x_0 part and right-hand side vanish too), proves
/// infeasibility, or is replaced by its combination, which only involves x_0
/// and joins A_0 on every rank. A_0 is then reduced identically on all ranks.
inline void lin_dependencies( PresolveContext& ctx )
{
   auto& ws = ctx.ws;
   const Real tol = ctx.cfg.feastol, zero_tol = ctx.cfg.zero_pivot_tol;
   std::vector<detail::CombinedRow> moved;

   for( int b : ws.blocks )
   {
      if( ctx.failed() )
         break;
      std::vector<RowKey> keys;
      std::vector<std::map<Index, Real>> local_part;
      ws.for_rows( RowScope::Local, [&]( RowKey r ) {
         if( ws.row( r ).block != b || !ws.row( r ).equality )
            return;
         keys.push_back( r );
         auto& m = local_part.emplace_back();
         ws.for_row_entries( r, [&]( ColKey c, Real a ) {
            if( c.is_local() )
               m[c.index()] += a;
         } );
      } );
      for( auto& [i, w] : eliminate_dependent( local_part, ctx.cfg.pivot_threshold, zero_tol ) )
      {
         std::map<Index, Real> combo;
         Real rhs = 0;
         for( auto [k, wk] : w )
         {
            rhs += wk * ws.row( keys[k] ).rhs;
            ws.for_row_entries( keys[k], [&]( ColKey c, Real a ) {
               if( c.is_link() )
                  combo[c.index()] += wk * a;
            } );
         }
         std::erase_if( combo, [&]( const auto& e ) { return std::fabs( e.second ) <= zero_tol; } );
         const RowKey p = keys[i];
         const auto& row = ws.row( p );
         if( combo.empty() )
         {
            if( std::fabs( rhs ) > tol )
            {
               ctx.fail( PresolveStatus::Infeasible, "dependent rows around " + row.name + " are inconsistent" );
               break;
            }
            ctx.stack.push( RedundantRow{ row.gid, false } );
            ctx.remove_row( p );
            continue;
         }
         detail::CombinedRow cr{ row.gid, ws.rank, row.name, rhs, { combo.begin(), combo.end() } };
         LinDepCombination rec{ row.gid, -1, ws.rank, false, rhs, {}, {} };
         for( auto [k, wk] : w )
            rec.weights.push_back( { ws.row( keys[k] ).gid, wk } );
         ctx.stack.push( std::move( rec ) );
         ctx.remove_row( p );
         moved.push_back( std::move( cr ) );
      }
   }

   // every rank appends the combinations in the same order
   const auto all = ctx.comm->allgather( moved, "lindep-moved" );
   auto& mine = ctx.stack.entries;
   std::size_t own_pos = 0;
   std::vector<std::size_t> own_records;
   for( std::size_t k = 0; k < mine.size(); ++k )
      if( auto* rec = std::get_if<LinDepCombination>( &mine[k] ); rec && rec->q < 0 && rec->owner == ws.rank )
         own_records.push_back( k );
   for( const auto& cr : all )
   {
      WorkRow q;
      q.lhs = q.rhs = cr.rhs;
      q.equality = true;
      q.gid = ws.next_row_gid++;
      q.name = "lindep_" + cr.name;
      std::vector<GidEntry> q_entries;
      for( auto [j, a] : cr.entries )
      {
         q.entries.push_back( { ColKey::link( j ), a } );
         q_entries.push_back( { ws.link_cols[j].gid, a } );
      }
      if( cr.owner == ws.rank )
      {
         auto& rec = std::get<LinDepCombination>( mine[own_records.at( own_pos++ )] );
         rec.q = q.gid;
         rec.q_entries = q_entries;
      }
      else
         ctx.stack.push( LinDepCombination{ cr.p, q.gid, cr.owner, false, cr.rhs, {}, std::move( q_entries ) } );
      ws.add_row( RowScope::Zero, std::move( q ) );
   }

   std::vector<RowKey> zkeys;
   std::vector<std::map<Index, Real>> zrows;
   ws.for_rows( RowScope::Zero, [&]( RowKey r ) {
      if( !ws.row( r ).equality )
         return;
      zkeys.push_back( r );
      auto& m = zrows.emplace_back();
      ws.for_row_entries( r, [&]( ColKey c, Real a ) { m[c.index()] += a; } );
   } );
   for( auto& [i, w] : eliminate_dependent( zrows, ctx.cfg.pivot_threshold, zero_tol ) )
   {
      if( ctx.failed() )
         break;
      Real rhs = 0;
      for( auto [k, wk] : w )
         rhs += wk * ws.row( zkeys[k] ).rhs;
      const auto& row = ws.row( zkeys[i] );
      if( std::fabs( rhs ) > tol )
      {
         ctx.fail( PresolveStatus::Infeasible, "dependent rows around " + row.name + " are inconsistent" );
         break;
      }
      ctx.stack.push( RedundantRow{ row.gid, true } );
      ctx.remove_row( zkeys[i] );
   }
   ctx.tracking = Tracking::compute_from_scratch( ws, *ctx.comm );
}

} // namespace ahlp

#endif
