#ifndef AHLP_PRESOLVE_WORKSPACE_HPP
#define AHLP_PRESOLVE_WORKSPACE_HPP

#include "ahlp/model/block_problem.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ahlp
{

/// Row groups of the arrowhead form.
enum class RowScope : std::uint8_t
{
   Zero  = 0, ///< A_0 / C_0 rows, replicated
   Link  = 1, ///< F / G rows, bounds replicated, entries distributed
   Local = 2  ///< rows of a diagonal block, owned by one rank
};

/// Packed row handle: scope in the top two bits, index below.
struct RowKey
{
   std::uint32_t v = 0;

   static RowKey make( RowScope s, Index i ) { return { ( std::uint32_t( s ) << 30 ) | std::uint32_t( i ) }; }
   RowScope scope() const { return RowScope( v >> 30 ); }
   Index index() const { return Index( v & 0x3FFFFFFFu ); }
   bool replicated() const { return scope() != RowScope::Local; }
   bool operator==( const RowKey& ) const = default;
   auto operator<=>( const RowKey& ) const = default;
};

/// Packed column handle: top bit set for local columns, clear for x_0.
struct ColKey
{
   std::uint32_t v = 0;

   static ColKey link( Index i ) { return { std::uint32_t( i ) }; }
   static ColKey local( Index i ) { return { 0x80000000u | std::uint32_t( i ) }; }
   bool is_local() const { return v >> 31; }
   bool is_link() const { return !is_local(); }
   Index index() const { return Index( v & 0x7FFFFFFFu ); }
   bool operator==( const ColKey& ) const = default;
   auto operator<=>( const ColKey& ) const = default;
};

struct RowEntry
{
   ColKey col;
   Real val;
};

struct ColEntry
{
   RowKey row;
   Real val;
};

struct WorkRow
{
   std::vector<RowEntry> entries; ///< entries held on this rank
   Real lhs = -kInf;
   Real rhs = kInf;
   bool equality = false;
   bool alive = true;
   int block = 0; ///< owning block for local rows, 0 otherwise
   std::int64_t gid = -1; ///< global row id (monolithic position, equalities first)
   std::string name;
};

struct WorkCol
{
   std::vector<ColEntry> entries; ///< entries held on this rank
   Real lower = 0;
   Real upper = kInf;
   Real cost = 0;
   bool alive = true;
   int block = 0; ///< owning block for local columns, 0 for x_0
   std::int64_t gid = -1; ///< global column id (monolithic position)
   std::string name;
};

/// Mutable per-rank view of a BlockProblem slice used by the presolve engine.
/// Deleted rows and columns are tombstoned (`alive == false`); adjacency lists
/// keep stale entries until `compact()`. Keys are never reused, so postsolve
/// records stay valid for the whole run.
struct Workspace
{
   int rank = 0;
   int nranks = 1;
   int num_blocks = 0;
   std::vector<int> blocks; ///< ids of blocks owned by this rank

   std::vector<WorkRow> zero_rows;
   std::vector<WorkRow> link_rows;
   std::vector<WorkRow> local_rows;
   std::vector<WorkCol> link_cols;
   std::vector<WorkCol> local_cols;

   Real offset_replicated = 0; ///< objective constant known on every rank
   Real offset_local = 0;      ///< objective constant from this rank's blocks
   std::int64_t next_row_gid = 0; ///< next id for rows created during presolve (replicated)

   std::vector<WorkRow>& rows_of( RowScope s )
   {
      return s == RowScope::Zero ? zero_rows : s == RowScope::Link ? link_rows : local_rows;
   }
   const std::vector<WorkRow>& rows_of( RowScope s ) const
   {
      return s == RowScope::Zero ? zero_rows : s == RowScope::Link ? link_rows : local_rows;
   }

   WorkRow& row( RowKey k ) { return rows_of( k.scope() )[k.index()]; }
   const WorkRow& row( RowKey k ) const { return rows_of( k.scope() )[k.index()]; }
   WorkCol& col( ColKey k ) { return k.is_local() ? local_cols[k.index()] : link_cols[k.index()]; }
   const WorkCol& col( ColKey k ) const { return k.is_local() ? local_cols[k.index()] : link_cols[k.index()]; }

   bool owns_block( int b ) const { return std::find( blocks.begin(), blocks.end(), b ) != blocks.end(); }

   /// Calls fn(key) for every alive row of a scope.
   template <typename Fn>
   void for_rows( RowScope s, Fn&& fn ) const
   {
      const auto& rows = rows_of( s );
      for( Index i = 0; i < static_cast<Index>( rows.size() ); ++i )
         if( rows[i].alive )
            fn( RowKey::make( s, i ) );
   }

   template <typename Fn>
   void for_all_rows( Fn&& fn ) const
   {
      for_rows( RowScope::Zero, fn );
      for_rows( RowScope::Link, fn );
      for_rows( RowScope::Local, fn );
   }

   /// Calls fn(col, val) for each entry of `r` whose column is alive.
   template <typename Fn>
   void for_row_entries( RowKey r, Fn&& fn ) const
   {
      for( const auto& e : row( r ).entries )
         if( col( e.col ).alive )
            fn( e.col, e.val );
   }

   /// Calls fn(row, val) for each entry of `c` whose row is alive.
   template <typename Fn>
   void for_col_entries( ColKey c, Fn&& fn ) const
   {
      for( const auto& e : col( c ).entries )
         if( row( e.row ).alive )
            fn( e.row, e.val );
   }

   Real coef( RowKey r, ColKey c ) const
   {
      for( const auto& e : row( r ).entries )
         if( e.col == c )
            return e.val;
      return 0.0;
   }

   /// Physically removes one entry from both adjacency lists.
   void erase_entry( RowKey r, ColKey c )
   {
      auto& re = row( r ).entries;
      re.erase( std::remove_if( re.begin(), re.end(), [&]( const RowEntry& e ) { return e.col == c; } ), re.end() );
      auto& ce = col( c ).entries;
      ce.erase( std::remove_if( ce.begin(), ce.end(), [&]( const ColEntry& e ) { return e.row == r; } ), ce.end() );
   }

   RowKey add_row( RowScope s, WorkRow row )
   {
      auto& rows = rows_of( s );
      const RowKey k = RowKey::make( s, static_cast<Index>( rows.size() ) );
      for( const auto& e : row.entries )
         col( e.col ).entries.push_back( { k, e.val } );
      rows.push_back( std::move( row ) );
      return k;
   }

   ColKey add_col( bool local, WorkCol c )
   {
      auto& cols = local ? local_cols : link_cols;
      const Index idx = static_cast<Index>( cols.size() );
      const ColKey k = local ? ColKey::local( idx ) : ColKey::link( idx );
      for( const auto& e : c.entries )
         row( e.row ).entries.push_back( { k, e.val } );
      cols.push_back( std::move( c ) );
      return k;
   }

   /// Drops adjacency entries that point at dead rows or columns.
   void compact()
   {
      for( auto* rows : { &zero_rows, &link_rows, &local_rows } )
         for( auto& r : *rows )
         {
            if( !r.alive )
            {
               r.entries.clear();
               r.entries.shrink_to_fit();
               continue;
            }
            std::erase_if( r.entries, [&]( const RowEntry& e ) { return !col( e.col ).alive; } );
         }
      for( auto* cols : { &link_cols, &local_cols } )
         for( auto& c : *cols )
         {
            if( !c.alive )
            {
               c.entries.clear();
               c.entries.shrink_to_fit();
               continue;
            }
            std::erase_if( c.entries, [&]( const ColEntry& e ) { return !row( e.row ).alive; } );
         }
   }

   Index count_alive( RowScope s ) const
   {
      Index n = 0;
      for( const auto& r : rows_of( s ) )
         n += r.alive;
      return n;
   }
};

/// Positions of every block in the monolithic ordering of the full problem.
/// Global ids follow that ordering: columns x_0, x_1, ..., x_N; equality rows
/// before inequality rows, each as A_0, blocks 1..N, linking.
struct GidLayout
{
   std::int64_t num_cols = 0;
   std::int64_t num_eq = 0;
   std::int64_t num_ineq = 0;
   std::int64_t zero_eq = 0;   ///< first id of A_0 rows (always 0)
   std::int64_t zero_ineq = 0; ///< first id of C_0 rows
   std::int64_t link_eq = 0;   ///< first id of linking equality rows
   std::int64_t link_ineq = 0; ///< first id of linking inequality rows
   std::vector<std::int64_t> block_col;  ///< per block id (index 0 unused)
   std::vector<std::int64_t> block_eq;
   std::vector<std::int64_t> block_ineq;
};

/// Layout from per-block sizes given as (id, ncols, neq, nineq) for all blocks.
inline GidLayout make_gid_layout( const LinkingPart& z, int num_blocks,
                                  const std::vector<std::array<std::int64_t, 4>>& sizes )
{
   GidLayout g;
   std::vector<std::array<std::int64_t, 4>> by_id( num_blocks + 1, { 0, 0, 0, 0 } );
   for( const auto& s : sizes )
      by_id.at( s[0] ) = s;
   g.block_col.assign( num_blocks + 1, 0 );
   g.block_eq.assign( num_blocks + 1, 0 );
   g.block_ineq.assign( num_blocks + 1, 0 );
   std::int64_t col = z.vars.size(), eq = z.eq0.size(), ineq = 0;
   for( int b = 1; b <= num_blocks; ++b )
   {
      g.block_col[b] = col;
      g.block_eq[b] = eq;
      col += by_id[b][1];
      eq += by_id[b][2];
   }
   g.link_eq = eq;
   g.num_eq = eq + z.link_eq.size();
   g.num_cols = col;
   ineq = g.num_eq + z.ineq0.size();
   g.zero_ineq = g.num_eq;
   for( int b = 1; b <= num_blocks; ++b )
   {
      g.block_ineq[b] = ineq;
      ineq += by_id[b][3];
   }
   g.link_ineq = ineq;
   g.num_ineq = ineq + z.link_ineq.size() - g.num_eq;
   return g;
}

inline std::vector<std::array<std::int64_t, 4>> block_sizes( const BlockProblem& p )
{
   std::vector<std::array<std::int64_t, 4>> out;
   for( const auto& blk : p.blocks )
      out.push_back( { blk.id, blk.vars.size(), blk.eq.size(), blk.ineq.size() } );
   return out;
}

/// Layout of the full problem that `slice` belongs to (collective).
inline GidLayout gid_layout( const BlockProblem& slice, Communicator& comm )
{
   return make_gid_layout( slice.zero, slice.num_blocks, comm.allgather( block_sizes( slice ), "gid-layout" ) );
}

inline GidLayout gid_layout( const BlockProblem& full )
{
   return make_gid_layout( full.zero, full.num_blocks, block_sizes( full ) );
}

/// Builds the workspace of one rank from its slice.
inline Workspace make_workspace( const BlockProblem& slice, int rank, int nranks, const GidLayout& layout )
{
   Workspace ws;
   ws.rank = rank;
   ws.nranks = nranks;
   ws.num_blocks = slice.num_blocks;
   const auto& z = slice.zero;
   for( Index j = 0; j < z.vars.size(); ++j )
   {
      WorkCol c;
      c.lower = z.vars.lower[j];
      c.upper = z.vars.upper[j];
      c.cost = z.vars.cost[j];
      c.name = z.vars.names[j];
      c.gid = j;
      ws.link_cols.push_back( std::move( c ) );
   }
   ws.offset_local = slice.objective_offset;
   ws.next_row_gid = layout.num_eq + layout.num_ineq;

   auto add_rows = [&]( RowScope scope, Index count, auto&& bounds, int block, std::int64_t gid0 ) {
      std::vector<RowKey> keys;
      for( Index i = 0; i < count; ++i )
      {
         WorkRow r;
         bounds( i, r );
         r.block = block;
         r.gid = gid0 + i;
         keys.push_back( ws.add_row( scope, std::move( r ) ) );
      }
      return keys;
   };
   auto eq_bounds = [&]( const EqRows& rows ) {
      return [&rows]( Index i, WorkRow& r ) {
         r.lhs = r.rhs = rows.rhs[i];
         r.equality = true;
         r.name = rows.names[i];
      };
   };
   auto ineq_bounds = [&]( const IneqRows& rows ) {
      return [&rows]( Index i, WorkRow& r ) {
         r.lhs = rows.lower[i];
         r.rhs = rows.upper[i];
         r.name = rows.names[i];
      };
   };
   auto link_entries = [&]( const SparseMatrix& m, const std::vector<RowKey>& keys, auto&& colkey ) {
      for( Index i = 0; i < m.rows(); ++i )
      {
         auto cs = m.row_cols( i );
         auto vs = m.row_vals( i );
         for( std::size_t k = 0; k < cs.size(); ++k )
         {
            const ColKey c = colkey( cs[k] );
            ws.row( keys[i] ).entries.push_back( { c, vs[k] } );
            ws.col( c ).entries.push_back( { keys[i], vs[k] } );
         }
      }
   };
   auto as_link = []( Index j ) { return ColKey::link( j ); };

   auto z_eq = add_rows( RowScope::Zero, z.eq0.size(), eq_bounds( z.eq0 ), 0, layout.zero_eq );
   link_entries( z.A0, z_eq, as_link );
   auto z_in = add_rows( RowScope::Zero, z.ineq0.size(), ineq_bounds( z.ineq0 ), 0, layout.zero_ineq );
   link_entries( z.C0, z_in, as_link );
   auto l_eq = add_rows( RowScope::Link, z.link_eq.size(), eq_bounds( z.link_eq ), 0, layout.link_eq );
   link_entries( z.F0, l_eq, as_link );
   auto l_in = add_rows( RowScope::Link, z.link_ineq.size(), ineq_bounds( z.link_ineq ), 0, layout.link_ineq );
   link_entries( z.G0, l_in, as_link );

   for( const auto& blk : slice.blocks )
   {
      ws.blocks.push_back( blk.id );
      const Index first = static_cast<Index>( ws.local_cols.size() );
      for( Index j = 0; j < blk.vars.size(); ++j )
      {
         WorkCol c;
         c.lower = blk.vars.lower[j];
         c.upper = blk.vars.upper[j];
         c.cost = blk.vars.cost[j];
         c.name = blk.vars.names[j];
         c.block = blk.id;
         c.gid = layout.block_col[blk.id] + j;
         ws.local_cols.push_back( std::move( c ) );
      }
      auto as_local = [first]( Index j ) { return ColKey::local( first + j ); };
      auto b_eq = add_rows( RowScope::Local, blk.eq.size(), eq_bounds( blk.eq ), blk.id, layout.block_eq[blk.id] );
      link_entries( blk.A, b_eq, as_link );
      link_entries( blk.B, b_eq, as_local );
      auto b_in =
          add_rows( RowScope::Local, blk.ineq.size(), ineq_bounds( blk.ineq ), blk.id, layout.block_ineq[blk.id] );
      link_entries( blk.C, b_in, as_link );
      link_entries( blk.D, b_in, as_local );
      link_entries( blk.F, l_eq, as_local );
      link_entries( blk.G, l_in, as_local );
   }
   return ws;
}

/// Mapping from a compacted BlockProblem slice back to workspace keys.
struct ExtractionMap
{
   std::vector<ColKey> zero_cols;              ///< x_0 position -> key
   std::vector<RowKey> zero_eq, zero_ineq;     ///< A_0 / C_0 row -> key
   std::vector<RowKey> link_eq, link_ineq;     ///< F / G row -> key
   std::vector<int> block_ids;                 ///< per slice block
   std::vector<std::vector<ColKey>> block_cols;
   std::vector<std::vector<RowKey>> block_eq, block_ineq;
};

/// Writes the alive part of the workspace as a BlockProblem slice. Blocks keep
/// their ids; rows and columns keep workspace order.
inline BlockProblem extract_slice( const Workspace& ws, ExtractionMap* map = nullptr )
{
   BlockProblem p;
   p.num_blocks = ws.num_blocks;
   p.objective_offset = ws.offset_local + ( ws.rank == 0 ? ws.offset_replicated : 0.0 );
   ExtractionMap m;

   std::vector<Index> link_pos( ws.link_cols.size(), -1 );
   for( Index j = 0; j < static_cast<Index>( ws.link_cols.size() ); ++j )
   {
      const auto& c = ws.link_cols[j];
      if( !c.alive )
         continue;
      link_pos[j] = p.zero.vars.size();
      p.zero.vars.push( c.lower, c.upper, c.cost, c.name );
      m.zero_cols.push_back( ColKey::link( j ) );
   }
   const Index n0 = p.zero.vars.size();

   std::vector<Index> local_pos( ws.local_cols.size(), -1 );
   std::vector<int> block_slot( ws.num_blocks + 1, -1 );
   for( int b : ws.blocks )
   {
      block_slot[b] = static_cast<int>( p.blocks.size() );
      LocalBlock blk;
      blk.id = b;
      p.blocks.push_back( std::move( blk ) );
      m.block_ids.push_back( b );
   }
   m.block_cols.resize( p.blocks.size() );
   m.block_eq.resize( p.blocks.size() );
   m.block_ineq.resize( p.blocks.size() );
   for( Index j = 0; j < static_cast<Index>( ws.local_cols.size() ); ++j )
   {
      const auto& c = ws.local_cols[j];
      if( !c.alive )
         continue;
      auto& blk = p.blocks[block_slot[c.block]];
      local_pos[j] = blk.vars.size();
      blk.vars.push( c.lower, c.upper, c.cost, c.name );
      m.block_cols[block_slot[c.block]].push_back( ColKey::local( j ) );
   }

   // zero_part / local_part triplets per destination matrix
   struct Dest
   {
      std::vector<Triplet> zero_part;
      std::vector<Triplet> local_part;
      Index rows = 0;
   };
   Dest a0, c0, f, g;
   std::vector<Dest> beq( p.blocks.size() ), bin( p.blocks.size() );
   std::vector<std::vector<Triplet>> bF( p.blocks.size() ), bG( p.blocks.size() );

   auto emit = [&]( const WorkRow& r, Index out_row, Dest& d, std::vector<std::vector<Triplet>>* link_local ) {
      for( const auto& e : r.entries )
      {
         const auto& c = ws.col( e.col );
         if( !c.alive )
            continue;
         if( e.col.is_link() )
            d.zero_part.push_back( { out_row, link_pos[e.col.index()], e.val } );
         else if( link_local )
            ( *link_local )[block_slot[c.block]].push_back( { out_row, local_pos[e.col.index()], e.val } );
         else
            d.local_part.push_back( { out_row, local_pos[e.col.index()], e.val } );
      }
   };

   for( Index i = 0; i < static_cast<Index>( ws.zero_rows.size() ); ++i )
   {
      const auto& r = ws.zero_rows[i];
      if( !r.alive )
         continue;
      const RowKey k = RowKey::make( RowScope::Zero, i );
      if( r.equality )
      {
         emit( r, a0.rows++, a0, nullptr );
         p.zero.eq0.rhs.push_back( r.rhs );
         p.zero.eq0.names.push_back( r.name );
         m.zero_eq.push_back( k );
      }
      else
      {
         emit( r, c0.rows++, c0, nullptr );
         p.zero.ineq0.lower.push_back( r.lhs );
         p.zero.ineq0.upper.push_back( r.rhs );
         p.zero.ineq0.names.push_back( r.name );
         m.zero_ineq.push_back( k );
      }
   }
   for( Index i = 0; i < static_cast<Index>( ws.link_rows.size() ); ++i )
   {
      const auto& r = ws.link_rows[i];
      if( !r.alive )
         continue;
      const RowKey k = RowKey::make( RowScope::Link, i );
      if( r.equality )
      {
         emit( r, f.rows++, f, &bF );
         p.zero.link_eq.rhs.push_back( r.rhs );
         p.zero.link_eq.names.push_back( r.name );
         m.link_eq.push_back( k );
      }
      else
      {
         emit( r, g.rows++, g, &bG );
         p.zero.link_ineq.lower.push_back( r.lhs );
         p.zero.link_ineq.upper.push_back( r.rhs );
         p.zero.link_ineq.names.push_back( r.name );
         m.link_ineq.push_back( k );
      }
   }
   for( Index i = 0; i < static_cast<Index>( ws.local_rows.size() ); ++i )
   {
      const auto& r = ws.local_rows[i];
      if( !r.alive )
         continue;
      const int s = block_slot[r.block];
      auto& blk = p.blocks[s];
      const RowKey k = RowKey::make( RowScope::Local, i );
      if( r.equality )
      {
         emit( r, beq[s].rows++, beq[s], nullptr );
         blk.eq.rhs.push_back( r.rhs );
         blk.eq.names.push_back( r.name );
         m.block_eq[s].push_back( k );
      }
      else
      {
         emit( r, bin[s].rows++, bin[s], nullptr );
         blk.ineq.lower.push_back( r.lhs );
         blk.ineq.upper.push_back( r.rhs );
         blk.ineq.names.push_back( r.name );
         m.block_ineq[s].push_back( k );
      }
   }

   p.zero.A0 = SparseMatrix::from_triplets( a0.rows, n0, std::move( a0.zero_part ) );
   p.zero.C0 = SparseMatrix::from_triplets( c0.rows, n0, std::move( c0.zero_part ) );
   p.zero.F0 = SparseMatrix::from_triplets( f.rows, n0, std::move( f.zero_part ) );
   p.zero.G0 = SparseMatrix::from_triplets( g.rows, n0, std::move( g.zero_part ) );
   for( std::size_t s = 0; s < p.blocks.size(); ++s )
   {
      auto& blk = p.blocks[s];
      const Index ni = blk.vars.size();
      blk.A = SparseMatrix::from_triplets( beq[s].rows, n0, std::move( beq[s].zero_part ) );
      blk.B = SparseMatrix::from_triplets( beq[s].rows, ni, std::move( beq[s].local_part ) );
      blk.C = SparseMatrix::from_triplets( bin[s].rows, n0, std::move( bin[s].zero_part ) );
      blk.D = SparseMatrix::from_triplets( bin[s].rows, ni, std::move( bin[s].local_part ) );
      blk.F = SparseMatrix::from_triplets( f.rows, ni, std::move( bF[s] ) );
      blk.G = SparseMatrix::from_triplets( g.rows, ni, std::move( bG[s] ) );
   }
   if( map )
      *map = std::move( m );
   return p;
}

} // namespace ahlp

#endif
