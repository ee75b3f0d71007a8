#ifndef AHLP_MODEL_BLOCK_PROBLEM_HPP
#define AHLP_MODEL_BLOCK_PROBLEM_HPP

#include "ahlp/comm/communicator.hpp"
#include "ahlp/model/sparse_matrix.hpp"

#include <cstring>
#include <string>
#include <vector>

namespace ahlp
{

struct VarData
{
   std::vector<Real> lower;
   std::vector<Real> upper;
   std::vector<Real> cost;
   std::vector<std::string> names;

   Index size() const { return static_cast<Index>( lower.size() ); }

   void push( Real l, Real u, Real c, std::string name )
   {
      lower.push_back( l );
      upper.push_back( u );
      cost.push_back( c );
      names.push_back( std::move( name ) );
   }

   bool operator==( const VarData& ) const = default;
};

/// Right-hand sides of equality rows.
struct EqRows
{
   std::vector<Real> rhs;
   std::vector<std::string> names;

   Index size() const { return static_cast<Index>( rhs.size() ); }
   bool operator==( const EqRows& ) const = default;
};

/// Ranged inequality rows d <= Cx <= f.
struct IneqRows
{
   std::vector<Real> lower;
   std::vector<Real> upper;
   std::vector<std::string> names;

   Index size() const { return static_cast<Index>( lower.size() ); }
   bool operator==( const IneqRows& ) const = default;
};

/// Diagonal block i > 0 with its border pieces.
struct LocalBlock
{
   int id = 1;
   SparseMatrix A; ///< local equality rows x x_0
   SparseMatrix B; ///< local equality rows x x_i
   SparseMatrix C; ///< local inequality rows x x_0
   SparseMatrix D; ///< local inequality rows x x_i
   SparseMatrix F; ///< linking equality rows x x_i
   SparseMatrix G; ///< linking inequality rows x x_i
   EqRows eq;
   IneqRows ineq;
   VarData vars;

   bool operator==( const LocalBlock& ) const = default;
};

/// Data every rank holds a replica of.
struct LinkingPart
{
   VarData vars; ///< x_0
   SparseMatrix A0;
   SparseMatrix C0;
   SparseMatrix F0;
   SparseMatrix G0;
   EqRows eq0;
   IneqRows ineq0;
   EqRows link_eq;
   IneqRows link_ineq;

   bool operator==( const LinkingPart& ) const = default;
};

/// Arrowhead LP. A full problem holds all blocks 1..N; a rank slice holds the
/// contiguous subrange of blocks assigned to that rank.
struct BlockProblem
{
   int num_blocks = 0;
   LinkingPart zero;
   std::vector<LocalBlock> blocks;
   Real objective_offset = 0.0;

   bool operator==( const BlockProblem& ) const = default;
};

/// Linear program min c'x, Ax = b, d <= Cx <= f, l <= x <= u.
struct MonolithicLP
{
   SparseMatrix A;
   std::vector<Real> b;
   SparseMatrix C;
   std::vector<Real> d;
   std::vector<Real> f;
   std::vector<Real> c;
   std::vector<Real> l;
   std::vector<Real> u;
   std::vector<std::string> eq_names;
   std::vector<std::string> ineq_names;
   std::vector<std::string> col_names;
   Real objective_offset = 0.0;
   std::string name = "AHLP";

   Index ncols() const { return static_cast<Index>( c.size() ); }
   Index neq() const { return static_cast<Index>( b.size() ); }
   Index nineq() const { return static_cast<Index>( d.size() ); }

   bool operator==( const MonolithicLP& ) const = default;
};

inline constexpr int kLinkOwner = -1;

/// Owner of every monolithic row / column. Rows: 0..N or kLinkOwner;
/// columns: 0..N where 0 marks linking variables. Local indices give the
/// position inside the owner group, which makes the maps bijections.
struct BlockAssignment
{
   int num_blocks = 0;
   std::vector<int> eq_owner;
   std::vector<int> ineq_owner;
   std::vector<int> col_owner;
   std::vector<Index> eq_local;
   std::vector<Index> ineq_local;
   std::vector<Index> col_local;

   bool operator==( const BlockAssignment& ) const = default;
};

inline Index n_zero_cols( const BlockProblem& p ) { return p.zero.vars.size(); }

/// First and one-past-last block id owned by `rank` when `nblocks` blocks are
/// spread over `nranks` ranks in contiguous ranges.
inline std::pair<int, int> block_range( int nblocks, int nranks, int rank )
{
   const int base = nblocks / nranks;
   const int extra = nblocks % nranks;
   const int first = 1 + rank * base + std::min( rank, extra );
   const int count = base + ( rank < extra ? 1 : 0 );
   return { first, first + count };
}

/// Index of the local block with id `block`, or -1.
inline int find_block( const BlockProblem& p, int block )
{
   for( std::size_t k = 0; k < p.blocks.size(); ++k )
      if( p.blocks[k].id == block )
         return static_cast<int>( k );
   return -1;
}

inline std::vector<BlockProblem> distribute( const BlockProblem& full, int nranks )
{
   if( nranks < 1 || ( full.num_blocks > 0 && nranks > full.num_blocks ) )
      throw InvalidProblem( "rank count must lie in [1, number of blocks]" );
   std::vector<BlockProblem> slices( nranks );
   for( int r = 0; r < nranks; ++r )
   {
      auto [first, last] = block_range( full.num_blocks, nranks, r );
      slices[r].num_blocks = full.num_blocks;
      slices[r].zero = full.zero;
      slices[r].objective_offset = r == 0 ? full.objective_offset : 0.0;
      for( const auto& blk : full.blocks )
         if( blk.id >= first && blk.id < last )
            slices[r].blocks.push_back( blk );
   }
   return slices;
}

/// Inverse of distribute. The linking part is taken from rank 0 and offsets are summed.
inline BlockProblem gather( const std::vector<BlockProblem>& slices )
{
   BlockProblem full;
   full.num_blocks = slices.front().num_blocks;
   full.zero = slices.front().zero;
   for( const auto& s : slices )
   {
      full.objective_offset += s.objective_offset;
      for( const auto& blk : s.blocks )
         full.blocks.push_back( blk );
   }
   std::sort( full.blocks.begin(), full.blocks.end(),
              []( const LocalBlock& a, const LocalBlock& b ) { return a.id < b.id; } );
   return full;
}

namespace detail
{

inline std::uint64_t fnv_bytes( std::uint64_t h, const void* data, std::size_t n )
{
   const auto* p = static_cast<const unsigned char*>( data );
   for( std::size_t k = 0; k < n; ++k )
   {
      h ^= p[k];
      h *= 1099511628211ULL;
   }
   return h;
}

template <typename T>
std::uint64_t fnv_vec( std::uint64_t h, const std::vector<T>& v )
{
   const std::uint64_t n = v.size();
   h = fnv_bytes( h, &n, sizeof( n ) );
   return v.empty() ? h : fnv_bytes( h, v.data(), v.size() * sizeof( T ) );
}

inline std::uint64_t fnv_matrix( std::uint64_t h, const SparseMatrix& m )
{
   const Index dims[2] = { m.rows(), m.cols() };
   h = fnv_bytes( h, dims, sizeof( dims ) );
   h = fnv_vec( h, m.offsets() );
   h = fnv_vec( h, m.indices() );
   return fnv_vec( h, m.values() );
}

} // namespace detail

/// Byte-level checksum of the replicated data (names excluded).
inline std::uint64_t replication_checksum( const LinkingPart& z )
{
   std::uint64_t h = 1469598103934665603ULL;
   h = detail::fnv_vec( h, z.vars.lower );
   h = detail::fnv_vec( h, z.vars.upper );
   h = detail::fnv_vec( h, z.vars.cost );
   for( const SparseMatrix* m : { &z.A0, &z.C0, &z.F0, &z.G0 } )
      h = detail::fnv_matrix( h, *m );
   h = detail::fnv_vec( h, z.eq0.rhs );
   h = detail::fnv_vec( h, z.ineq0.lower );
   h = detail::fnv_vec( h, z.ineq0.upper );
   h = detail::fnv_vec( h, z.link_eq.rhs );
   h = detail::fnv_vec( h, z.link_ineq.lower );
   return detail::fnv_vec( h, z.link_ineq.upper );
}

namespace detail
{

inline void check_dims( std::vector<std::string>& out, const std::string& what, const SparseMatrix& m, Index rows,
                        Index cols )
{
   if( m.rows() != rows || m.cols() != cols )
      out.push_back( "dimension: " + what + " is " + std::to_string( m.rows() ) + "x" + std::to_string( m.cols() ) +
                     ", expected " + std::to_string( rows ) + "x" + std::to_string( cols ) );
   else if( auto msg = m.check(); !msg.empty() )
      out.push_back( "storage: " + what + ": " + msg );
}

inline void check_vars( std::vector<std::string>& out, const std::string& what, const VarData& v )
{
   const std::size_t n = v.lower.size();
   if( v.upper.size() != n || v.cost.size() != n || v.names.size() != n )
   {
      out.push_back( "dimension: variable data of " + what + " has inconsistent lengths" );
      return;
   }
   for( std::size_t j = 0; j < n; ++j )
   {
      if( v.lower[j] > v.upper[j] )
         out.push_back( "bounds: " + what + " variable " + std::to_string( j ) + " has l > u" );
      if( v.lower[j] == kInf || v.upper[j] == -kInf || std::isnan( v.lower[j] ) || std::isnan( v.upper[j] ) ||
          !std::isfinite( v.cost[j] ) )
         out.push_back( "bounds: " + what + " variable " + std::to_string( j ) + " has an invalid value" );
   }
}

inline void check_eq( std::vector<std::string>& out, const std::string& what, const EqRows& r )
{
   if( r.names.size() != r.rhs.size() )
      out.push_back( "dimension: " + what + " names/rhs length mismatch" );
   for( std::size_t i = 0; i < r.rhs.size(); ++i )
      if( !std::isfinite( r.rhs[i] ) )
         out.push_back( "bounds: " + what + " row " + std::to_string( i ) + " has a non-finite rhs" );
}

inline void check_ineq( std::vector<std::string>& out, const std::string& what, const IneqRows& r )
{
   if( r.names.size() != r.lower.size() || r.upper.size() != r.lower.size() )
   {
      out.push_back( "dimension: " + what + " bound arrays have inconsistent lengths" );
      return;
   }
   for( std::size_t i = 0; i < r.lower.size(); ++i )
      if( r.lower[i] > r.upper[i] || r.lower[i] == kInf || r.upper[i] == -kInf )
         out.push_back( "bounds: " + what + " row " + std::to_string( i ) + " has d > f" );
}

} // namespace detail

/// Structural diagnostics; empty means the problem is a valid arrowhead LP.
/// Replica divergence of the linking part is detected with a checksum
/// allreduce, so this is a collective call.
inline std::vector<std::string> validate_arrowhead( const BlockProblem& p, Communicator& comm )
{
   std::vector<std::string> out;
   const auto& z = p.zero;
   const Index n0 = z.vars.size();
   const Index mla = z.link_eq.size();
   const Index mlc = z.link_ineq.size();
   detail::check_vars( out, "x_0", z.vars );
   detail::check_eq( out, "b_0", z.eq0 );
   detail::check_ineq( out, "d_0/f_0", z.ineq0 );
   detail::check_eq( out, "b_N+1", z.link_eq );
   detail::check_ineq( out, "d_N+1/f_N+1", z.link_ineq );
   detail::check_dims( out, "A_0", z.A0, z.eq0.size(), n0 );
   detail::check_dims( out, "C_0", z.C0, z.ineq0.size(), n0 );
   detail::check_dims( out, "F_0", z.F0, mla, n0 );
   detail::check_dims( out, "G_0", z.G0, mlc, n0 );
   int prev = 0;
   for( const auto& blk : p.blocks )
   {
      const std::string id = std::to_string( blk.id );
      if( blk.id <= prev || blk.id > p.num_blocks )
         out.push_back( "dimension: block id " + id + " out of order or out of range" );
      prev = blk.id;
      const Index ni = blk.vars.size();
      detail::check_vars( out, "x_" + id, blk.vars );
      detail::check_eq( out, "b_" + id, blk.eq );
      detail::check_ineq( out, "d_" + id + "/f_" + id, blk.ineq );
      detail::check_dims( out, "A_" + id, blk.A, blk.eq.size(), n0 );
      detail::check_dims( out, "B_" + id, blk.B, blk.eq.size(), ni );
      detail::check_dims( out, "C_" + id, blk.C, blk.ineq.size(), n0 );
      detail::check_dims( out, "D_" + id, blk.D, blk.ineq.size(), ni );
      detail::check_dims( out, "F_" + id, blk.F, mla, ni );
      detail::check_dims( out, "G_" + id, blk.G, mlc, ni );
   }
   const std::uint64_t h = replication_checksum( z );
   const auto lo = comm.allreduce( h, ops::min<std::uint64_t>(), "replication-check" );
   const auto hi = comm.allreduce( h, ops::max<std::uint64_t>(), "replication-check" );
   if( lo != hi )
      out.push_back( "replication: linking data differs between ranks (rank " + std::to_string( comm.rank() ) +
                     " checksum " + std::to_string( h ) + ")" );
   return out;
}

inline std::vector<std::string> validate_arrowhead( const BlockProblem& p )
{
   auto comm = self_communicator();
   return validate_arrowhead( p, comm );
}

struct SizeCounts
{
   std::int64_t nonzeros = 0;
   std::int64_t rows = 0;
   std::int64_t cols = 0;
   bool operator==( const SizeCounts& ) const = default;
};

/// Global size; replicated data is counted once (by rank 0).
inline SizeCounts nnz_counts( const BlockProblem& p, Communicator& comm )
{
   std::vector<std::int64_t> local( 3, 0 );
   for( const auto& blk : p.blocks )
   {
      local[0] += blk.A.nnz() + blk.B.nnz() + blk.C.nnz() + blk.D.nnz() + blk.F.nnz() + blk.G.nnz();
      local[1] += blk.eq.size() + blk.ineq.size();
      local[2] += blk.vars.size();
   }
   if( comm.rank() == 0 )
   {
      const auto& z = p.zero;
      local[0] += z.A0.nnz() + z.C0.nnz() + z.F0.nnz() + z.G0.nnz();
      local[1] += z.eq0.size() + z.ineq0.size() + z.link_eq.size() + z.link_ineq.size();
      local[2] += z.vars.size();
   }
   auto g = comm.allreduce( local, ops::sum<std::int64_t>(), "nnz-counts" );
   return { g[0], g[1], g[2] };
}

inline SizeCounts nnz_counts( const BlockProblem& p )
{
   auto comm = self_communicator();
   return nnz_counts( p, comm );
}

/// Stacks a full problem into monolithic form. Row order: A_0 rows, then the
/// local equality rows of blocks 1..N, then linking equality rows (same for
/// inequalities); column order x_0, x_1, ..., x_N.
inline std::pair<MonolithicLP, BlockAssignment> assemble_monolithic( const BlockProblem& p )
{
   if( auto errs = validate_arrowhead( p ); !errs.empty() )
      throw InvalidProblem( "cannot assemble invalid block problem: " + errs.front() );
   if( static_cast<int>( p.blocks.size() ) != p.num_blocks )
      throw InvalidProblem( "assembly needs the full problem with all blocks" );

   MonolithicLP lp;
   BlockAssignment a;
   a.num_blocks = p.num_blocks;
   const auto& z = p.zero;
   const Index n0 = z.vars.size();

   std::vector<Index> col_start( p.num_blocks + 1, 0 );
   Index ncols = n0;
   for( int b = 0; b < p.num_blocks; ++b )
   {
      col_start[b + 1] = ncols;
      ncols += p.blocks[b].vars.size();
   }
   auto add_vars = [&]( const VarData& v, int owner ) {
      for( Index j = 0; j < v.size(); ++j )
      {
         lp.l.push_back( v.lower[j] );
         lp.u.push_back( v.upper[j] );
         lp.c.push_back( v.cost[j] );
         lp.col_names.push_back( v.names[j] );
         a.col_owner.push_back( owner );
         a.col_local.push_back( j );
      }
   };
   add_vars( z.vars, 0 );
   for( const auto& blk : p.blocks )
      add_vars( blk.vars, blk.id );

   std::vector<Triplet> eq, ineq;
   auto put = [&]( std::vector<Triplet>& out, Index row, const SparseMatrix& m, Index mrow, Index coloff ) {
      auto cs = m.row_cols( mrow );
      auto vs = m.row_vals( mrow );
      for( std::size_t k = 0; k < cs.size(); ++k )
         out.push_back( { row, cs[k] + coloff, vs[k] } );
   };

   Index r = 0;
   for( Index i = 0; i < z.eq0.size(); ++i, ++r )
   {
      put( eq, r, z.A0, i, 0 );
      lp.b.push_back( z.eq0.rhs[i] );
      lp.eq_names.push_back( z.eq0.names[i] );
      a.eq_owner.push_back( 0 );
      a.eq_local.push_back( i );
   }
   for( int b = 0; b < p.num_blocks; ++b )
   {
      const auto& blk = p.blocks[b];
      for( Index i = 0; i < blk.eq.size(); ++i, ++r )
      {
         put( eq, r, blk.A, i, 0 );
         put( eq, r, blk.B, i, col_start[b + 1] );
         lp.b.push_back( blk.eq.rhs[i] );
         lp.eq_names.push_back( blk.eq.names[i] );
         a.eq_owner.push_back( blk.id );
         a.eq_local.push_back( i );
      }
   }
   for( Index i = 0; i < z.link_eq.size(); ++i, ++r )
   {
      put( eq, r, z.F0, i, 0 );
      for( int b = 0; b < p.num_blocks; ++b )
         put( eq, r, p.blocks[b].F, i, col_start[b + 1] );
      lp.b.push_back( z.link_eq.rhs[i] );
      lp.eq_names.push_back( z.link_eq.names[i] );
      a.eq_owner.push_back( kLinkOwner );
      a.eq_local.push_back( i );
   }
   lp.A = SparseMatrix::from_triplets( r, ncols, std::move( eq ) );

   r = 0;
   for( Index i = 0; i < z.ineq0.size(); ++i, ++r )
   {
      put( ineq, r, z.C0, i, 0 );
      lp.d.push_back( z.ineq0.lower[i] );
      lp.f.push_back( z.ineq0.upper[i] );
      lp.ineq_names.push_back( z.ineq0.names[i] );
      a.ineq_owner.push_back( 0 );
      a.ineq_local.push_back( i );
   }
   for( int b = 0; b < p.num_blocks; ++b )
   {
      const auto& blk = p.blocks[b];
      for( Index i = 0; i < blk.ineq.size(); ++i, ++r )
      {
         put( ineq, r, blk.C, i, 0 );
         put( ineq, r, blk.D, i, col_start[b + 1] );
         lp.d.push_back( blk.ineq.lower[i] );
         lp.f.push_back( blk.ineq.upper[i] );
         lp.ineq_names.push_back( blk.ineq.names[i] );
         a.ineq_owner.push_back( blk.id );
         a.ineq_local.push_back( i );
      }
   }
   for( Index i = 0; i < z.link_ineq.size(); ++i, ++r )
   {
      put( ineq, r, z.G0, i, 0 );
      for( int b = 0; b < p.num_blocks; ++b )
         put( ineq, r, p.blocks[b].G, i, col_start[b + 1] );
      lp.d.push_back( z.link_ineq.lower[i] );
      lp.f.push_back( z.link_ineq.upper[i] );
      lp.ineq_names.push_back( z.link_ineq.names[i] );
      a.ineq_owner.push_back( kLinkOwner );
      a.ineq_local.push_back( i );
   }
   lp.C = SparseMatrix::from_triplets( r, ncols, std::move( ineq ) );
   lp.objective_offset = p.objective_offset;
   return { std::move( lp ), std::move( a ) };
}

/// Recomputes the local indices of an assignment from its owner arrays
/// (position of each row/column within its owner group, in monolithic order).
inline void number_assignment( BlockAssignment& a )
{
   auto number = []( const std::vector<int>& owner, std::vector<Index>& local, int nblocks ) {
      std::vector<Index> next( nblocks + 2, 0 );
      local.assign( owner.size(), 0 );
      for( std::size_t k = 0; k < owner.size(); ++k )
         local[k] = next[owner[k] + 1]++;
   };
   number( a.eq_owner, a.eq_local, a.num_blocks );
   number( a.ineq_owner, a.ineq_local, a.num_blocks );
   number( a.col_owner, a.col_local, a.num_blocks );
}

/// Splits a monolithic LP into block form. Throws InvalidProblem listing the
/// offending (row, column) pair when a row touches a column outside its block.
inline BlockProblem split( const MonolithicLP& lp, const BlockAssignment& a )
{
   const int N = a.num_blocks;
   if( static_cast<Index>( a.col_owner.size() ) != lp.ncols() || static_cast<Index>( a.eq_owner.size() ) != lp.neq() ||
       static_cast<Index>( a.ineq_owner.size() ) != lp.nineq() )
      throw InvalidProblem( "block assignment does not cover the problem" );

   BlockProblem p;
   p.num_blocks = N;
   p.blocks.resize( N );
   for( int b = 0; b < N; ++b )
      p.blocks[b].id = b + 1;
   p.objective_offset = lp.objective_offset;

   for( Index j = 0; j < lp.ncols(); ++j )
   {
      const int o = a.col_owner[j];
      if( o < 0 || o > N )
         throw InvalidProblem( "column " + lp.col_names[j] + " has out-of-range owner" );
      VarData& v = o == 0 ? p.zero.vars : p.blocks[o - 1].vars;
      if( v.size() != a.col_local[j] )
         throw InvalidProblem( "column local indices are not consecutive" );
      v.push( lp.l[j], lp.u[j], lp.c[j], lp.col_names[j] );
   }

   auto split_rows = [&]( const SparseMatrix& M, const std::vector<int>& owner, const std::vector<Index>& local,
                          const std::vector<std::string>& names, bool eq ) {
      std::vector<Triplet> zero_rows, link_zero;
      std::vector<std::vector<Triplet>> blk_zero( N ), blk_own( N ), blk_link( N );
      for( Index i = 0; i < M.rows(); ++i )
      {
         const int o = owner[i];
         if( o != kLinkOwner && ( o < 0 || o > N ) )
            throw InvalidProblem( "row " + names[i] + " has out-of-range owner" );
         auto cs = M.row_cols( i );
         auto vs = M.row_vals( i );
         for( std::size_t k = 0; k < cs.size(); ++k )
         {
            const Index j = cs[k];
            const int co = a.col_owner[j];
            const Index lj = a.col_local[j];
            const Index li = local[i];
            if( co == 0 )
            {
               if( o == 0 )
                  zero_rows.push_back( { li, lj, vs[k] } );
               else if( o == kLinkOwner )
                  link_zero.push_back( { li, lj, vs[k] } );
               else
                  blk_zero[o - 1].push_back( { li, lj, vs[k] } );
            }
            else if( o == kLinkOwner )
               blk_link[co - 1].push_back( { li, lj, vs[k] } );
            else if( o == co )
               blk_own[co - 1].push_back( { li, lj, vs[k] } );
            else
               throw InvalidProblem( "structure: row " + names[i] + " (block " +
                                     ( o == kLinkOwner ? std::string( "L" ) : std::to_string( o ) ) +
                                     ") touches column " + lp.col_names[j] + " (block " + std::to_string( co ) +
                                     ")" );
         }
      }
      const Index n0 = p.zero.vars.size();
      Index nzero = 0, nlink = 0;
      std::vector<Index> nblk( N, 0 );
      for( Index i = 0; i < M.rows(); ++i )
      {
         const int o = owner[i];
         if( o == 0 )
            ++nzero;
         else if( o == kLinkOwner )
            ++nlink;
         else
            ++nblk[o - 1];
      }
      auto& z = p.zero;
      ( eq ? z.A0 : z.C0 ) = SparseMatrix::from_triplets( nzero, n0, std::move( zero_rows ) );
      ( eq ? z.F0 : z.G0 ) = SparseMatrix::from_triplets( nlink, n0, std::move( link_zero ) );
      for( int b = 0; b < N; ++b )
      {
         auto& blk = p.blocks[b];
         const Index ni = blk.vars.size();
         ( eq ? blk.A : blk.C ) = SparseMatrix::from_triplets( nblk[b], n0, std::move( blk_zero[b] ) );
         ( eq ? blk.B : blk.D ) = SparseMatrix::from_triplets( nblk[b], ni, std::move( blk_own[b] ) );
         ( eq ? blk.F : blk.G ) = SparseMatrix::from_triplets( nlink, ni, std::move( blk_link[b] ) );
      }
   };
   split_rows( lp.A, a.eq_owner, a.eq_local, lp.eq_names, true );
   split_rows( lp.C, a.ineq_owner, a.ineq_local, lp.ineq_names, false );

   for( Index i = 0; i < lp.neq(); ++i )
   {
      const int o = a.eq_owner[i];
      EqRows& r = o == 0 ? p.zero.eq0 : o == kLinkOwner ? p.zero.link_eq : p.blocks[o - 1].eq;
      if( r.size() != a.eq_local[i] )
         throw InvalidProblem( "equality row local indices are not consecutive" );
      r.rhs.push_back( lp.b[i] );
      r.names.push_back( lp.eq_names[i] );
   }
   for( Index i = 0; i < lp.nineq(); ++i )
   {
      const int o = a.ineq_owner[i];
      IneqRows& r = o == 0 ? p.zero.ineq0 : o == kLinkOwner ? p.zero.link_ineq : p.blocks[o - 1].ineq;
      if( r.size() != a.ineq_local[i] )
         throw InvalidProblem( "inequality row local indices are not consecutive" );
      r.lower.push_back( lp.d[i] );
      r.upper.push_back( lp.f[i] );
      r.names.push_back( lp.ineq_names[i] );
   }
   return p;
}

} // namespace ahlp

#endif
