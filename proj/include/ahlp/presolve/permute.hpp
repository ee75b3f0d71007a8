#ifndef AHLP_PRESOLVE_PERMUTE_HPP
#define AHLP_PRESOLVE_PERMUTE_HPP

#include "ahlp/presolve/context.hpp"

#include <set>

namespace ahlp
{

/// Rank that owns block b under the contiguous block distribution.
inline int block_owner( const Workspace& ws, int b )
{
   for( int r = 0; r < ws.nranks; ++r )
   {
      auto [first, last] = block_range( ws.num_blocks, ws.nranks, r );
      if( b >= first && b < last )
         return r;
   }
   throw ContractViolation( "block " + std::to_string( b ) + " has no owner" );
}

namespace detail
{

   /// Per linking row and per linking column: number of blocks holding local
   /// entries and the largest such block id (collective).
   struct PlacementStats
   {
      std::vector<std::int64_t> row_blocks, row_block;
      std::vector<std::int64_t> col_blocks, col_block;
   };

   inline PlacementStats placement_stats( const Workspace& ws, Communicator& comm )
   {
      const std::size_t m = ws.link_rows.size(), n = ws.link_cols.size();
      PlacementStats s;
      std::vector<std::int64_t> counts( m + n, 0 ), ids( m + n, 0 );
      for( std::size_t i = 0; i < m; ++i )
      {
         const RowKey r = RowKey::make( RowScope::Link, static_cast<Index>( i ) );
         if( !ws.row( r ).alive )
            continue;
         std::set<int> blocks;
         ws.for_row_entries( r, [&]( ColKey c, Real ) {
            if( c.is_local() )
               blocks.insert( ws.col( c ).block );
         } );
         counts[i] = blocks.size();
         ids[i] = blocks.empty() ? 0 : *blocks.rbegin();
      }
      for( std::size_t j = 0; j < n; ++j )
      {
         const ColKey c = ColKey::link( static_cast<Index>( j ) );
         if( !ws.col( c ).alive )
            continue;
         std::set<int> blocks;
         ws.for_col_entries( c, [&]( RowKey r, Real ) {
            if( r.scope() == RowScope::Local )
               blocks.insert( ws.row( r ).block );
         } );
         counts[m + j] = blocks.size();
         ids[m + j] = blocks.empty() ? 0 : *blocks.rbegin();
      }
      const std::string tag = "permute-stats:" + std::to_string( m ) + "x" + std::to_string( n );
      counts = comm.allreduce( counts, ops::sum<std::int64_t>(), tag );
      ids = comm.allreduce( ids, ops::max<std::int64_t>(), tag );
      s.row_blocks.assign( counts.begin(), counts.begin() + m );
      s.row_block.assign( ids.begin(), ids.begin() + m );
      s.col_blocks.assign( counts.begin() + m, counts.end() );
      s.col_block.assign( ids.begin() + m, ids.end() );
      return s;
   }

   inline WorkRow moved_row( const Workspace& ws, RowKey r, int block )
   {
      const auto& src = ws.row( r );
      WorkRow row;
      row.lhs = src.lhs;
      row.rhs = src.rhs;
      row.equality = src.equality;
      row.block = block;
      row.gid = src.gid;
      row.name = src.name;
      ws.for_row_entries( r, [&]( ColKey c, Real a ) { row.entries.push_back( { c, a } ); } );
      return row;
   }

   inline WorkCol moved_col( const Workspace& ws, ColKey c, int block )
   {
      const auto& src = ws.col( c );
      WorkCol col;
      col.lower = src.lower;
      col.upper = src.upper;
      col.cost = src.cost;
      col.block = block;
      col.gid = src.gid;
      col.name = src.name;
      ws.for_col_entries( c, [&]( RowKey r, Real a ) { col.entries.push_back( { r, a } ); } );
      return col;
   }

   struct RowPayload
   {
      std::int64_t gid;
      int block;
      std::string name;
      Real lhs, rhs;
      bool equality;
      std::vector<std::pair<Index, Real>> entries; ///< linking column index, value
   };

   struct ColPayload
   {
      std::int64_t gid;
      int block;
      std::string name;
      Real lower, upper, cost;
      std::vector<std::pair<Index, Real>> entries; ///< linking row index, value
   };

   inline std::int64_t move_link_rows( PresolveContext& ctx )
   {
      auto& ws = ctx.ws;
      const auto s = placement_stats( ws, *ctx.comm );
      std::int64_t moves = 0;
      for( std::size_t i = 0; i < ws.link_rows.size(); ++i )
      {
         const RowKey r = RowKey::make( RowScope::Link, static_cast<Index>( i ) );
         if( !ws.row( r ).alive )
            continue;
         bool has_link = false;
         ws.for_row_entries( r, [&]( ColKey c, Real ) { has_link = has_link || c.is_link(); } );
         if( s.row_blocks[i] == 0 && !has_link )
            continue;
         if( s.row_blocks[i] == 0 )
         {
            ctx.stack.push( PermutationMove{ MoveKind::RowLinkToZero, ws.row( r ).gid, 0, 0, 0, {} } );
            ws.add_row( RowScope::Zero, moved_row( ws, r, 0 ) );
            ws.row( r ).alive = false;
            if( auto* t = ctx.count( true ) )
               t->rows_moved += 1;
            ++moves;
            continue;
         }
         if( s.row_blocks[i] != 1 )
            continue;
         // the row lands in [A_b B_b]; its x_0 part must not turn a 0-link column into a linking one
         bool legal = true;
         ws.for_row_entries( r, [&]( ColKey c, Real ) {
            if( c.is_link() && s.col_blocks[c.index()] == 0 )
               legal = false;
         } );
         if( !legal )
            continue;
         const int b = static_cast<int>( s.row_block[i] );
         const int owner = block_owner( ws, b );
         ctx.stack.push( PermutationMove{ MoveKind::RowLinkToLocal, ws.row( r ).gid, owner, b, 0, {} } );
         if( ws.owns_block( b ) )
         {
            ws.add_row( RowScope::Local, moved_row( ws, r, b ) );
            ctx.tally().rows_moved += 1;
         }
         ws.row( r ).alive = false;
         ++moves;
      }
      return moves;
   }

   inline std::int64_t move_link_cols( PresolveContext& ctx )
   {
      auto& ws = ctx.ws;
      const auto s = placement_stats( ws, *ctx.comm );
      std::int64_t moves = 0;
      for( std::size_t j = 0; j < ws.link_cols.size(); ++j )
      {
         const ColKey c = ColKey::link( static_cast<Index>( j ) );
         if( !ws.col( c ).alive || s.col_blocks[j] != 1 )
            continue;
         bool in_zero = false;
         ws.for_col_entries( c, [&]( RowKey r, Real ) { in_zero = in_zero || r.scope() == RowScope::Zero; } );
         if( in_zero )
            continue;
         const int b = static_cast<int>( s.col_block[j] );
         const int owner = block_owner( ws, b );
         ctx.stack.push( PermutationMove{ MoveKind::ColLinkToLocal, ws.col( c ).gid, owner, b, ws.col( c ).cost, {} } );
         if( ws.owns_block( b ) )
         {
            ws.add_col( true, moved_col( ws, c, b ) );
            ctx.tally().cols_moved += 1;
         }
         ws.col( c ).alive = false;
         ++moves;
      }
      return moves;
   }

   inline std::int64_t move_local_rows( PresolveContext& ctx )
   {
      auto& ws = ctx.ws;
      std::vector<RowPayload> out;
      ws.for_rows( RowScope::Local, [&]( RowKey r ) {
         bool has_local = false, has_link = false;
         ws.for_row_entries( r, [&]( ColKey c, Real ) {
            has_local = has_local || c.is_local();
            has_link = has_link || c.is_link();
         } );
         if( has_local || !has_link )
            return;
         const auto& row = ws.row( r );
         RowPayload p{ row.gid, row.block, row.name, row.lhs, row.rhs, row.equality, {} };
         ws.for_row_entries( r, [&]( ColKey c, Real a ) { p.entries.push_back( { c.index(), a } ); } );
         out.push_back( std::move( p ) );
         ws.row( r ).alive = false;
         ctx.tally().rows_moved += 1;
      } );
      const auto all = ctx.comm->allgather( out, "permute-local-rows" );
      for( const auto& p : all )
      {
         WorkRow row;
         row.lhs = p.lhs;
         row.rhs = p.rhs;
         row.equality = p.equality;
         row.gid = p.gid;
         row.name = p.name;
         PermutationMove mv{ MoveKind::RowLocalToZero, p.gid, block_owner( ws, p.block ), p.block, 0, {} };
         for( auto [j, a] : p.entries )
         {
            row.entries.push_back( { ColKey::link( j ), a } );
            mv.entries.push_back( { ws.link_cols[j].gid, a } );
         }
         ctx.stack.push( std::move( mv ) );
         ws.add_row( RowScope::Zero, std::move( row ) );
      }
      return static_cast<std::int64_t>( all.size() );
   }

   inline std::int64_t move_local_cols( PresolveContext& ctx )
   {
      auto& ws = ctx.ws;
      std::vector<ColPayload> out;
      for( Index j = 0; j < static_cast<Index>( ws.local_cols.size() ); ++j )
      {
         const ColKey c = ColKey::local( j );
         if( !ws.col( c ).alive )
            continue;
         bool in_local = false, in_link = false;
         ws.for_col_entries( c, [&]( RowKey r, Real ) {
            in_local = in_local || r.scope() == RowScope::Local;
            in_link = in_link || r.scope() == RowScope::Link;
         } );
         if( in_local || !in_link )
            continue;
         const auto& col = ws.col( c );
         ColPayload p{ col.gid, col.block, col.name, col.lower, col.upper, col.cost, {} };
         ws.for_col_entries( c, [&]( RowKey r, Real a ) { p.entries.push_back( { r.index(), a } ); } );
         out.push_back( std::move( p ) );
         ws.col( c ).alive = false;
         ctx.tally().cols_moved += 1;
      }
      const auto all = ctx.comm->allgather( out, "permute-local-cols" );
      for( const auto& p : all )
      {
         WorkCol col;
         col.lower = p.lower;
         col.upper = p.upper;
         col.cost = p.cost;
         col.gid = p.gid;
         col.name = p.name;
         PermutationMove mv{ MoveKind::ColLocalToLink, p.gid, block_owner( ws, p.block ), p.block, p.cost, {} };
         for( auto [i, a] : p.entries )
         {
            col.entries.push_back( { RowKey::make( RowScope::Link, i ), a } );
            mv.entries.push_back( { ws.link_rows[i].gid, a } );
         }
         ctx.stack.push( std::move( mv ) );
         ws.add_col( false, std::move( col ) );
      }
      return static_cast<std::int64_t>( all.size() );
   }

} // namespace detail

/// Moves rows and columns to the narrowest group that can hold them until no
/// move applies, then rebuilds the tracking records (collective).
///   linking row without local entries      -> A_0 / C_0
///   linking row with entries in one block  -> rows of that block
///   linking column used by one block only  -> columns of that block
///   local row without local columns        -> A_0 / C_0
///   local column used by linking rows only -> x_0 (0-link column)
inline void permute( PresolveContext& ctx )
{
   std::int64_t moves = 0;
   do
   {
      moves = detail::move_link_rows( ctx );
      moves += detail::move_link_cols( ctx );
      moves += detail::move_local_rows( ctx );
      moves += detail::move_local_cols( ctx );
   } while( moves > 0 );
   ctx.tracking = Tracking::compute_from_scratch( ctx.ws, *ctx.comm );
}

} // namespace ahlp

#endif
