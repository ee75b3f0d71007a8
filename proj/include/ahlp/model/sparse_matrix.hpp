#ifndef AHLP_MODEL_SPARSE_MATRIX_HPP
#define AHLP_MODEL_SPARSE_MATRIX_HPP

#include "ahlp/core.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace ahlp
{

struct Triplet
{
   Index row;
   Index col;
   Real val;
};

/// Row-major compressed sparse matrix. Column indices are strictly increasing
/// inside each row and explicit zeros are never stored.
class SparseMatrix
{
 public:
   SparseMatrix() = default;
   SparseMatrix( Index nrows, Index ncols ) : nrows_( nrows ), ncols_( ncols ), offsets_( nrows + 1, 0 ) {}

   /// Duplicate (row, col) pairs are summed; entries that sum to zero are dropped.
   static SparseMatrix from_triplets( Index nrows, Index ncols, std::vector<Triplet> trips )
   {
      std::sort( trips.begin(), trips.end(), []( const Triplet& a, const Triplet& b ) {
         return std::tie( a.row, a.col ) < std::tie( b.row, b.col );
      } );
      SparseMatrix m( nrows, ncols );
      std::size_t k = 0;
      for( Index r = 0; r < nrows; ++r )
      {
         while( k < trips.size() && trips[k].row == r )
         {
            Index c = trips[k].col;
            Real v = 0;
            while( k < trips.size() && trips[k].row == r && trips[k].col == c )
               v += trips[k++].val;
            if( v != 0.0 )
            {
               m.cols_.push_back( c );
               m.vals_.push_back( v );
            }
         }
         m.offsets_[r + 1] = static_cast<Index>( m.cols_.size() );
      }
      if( k != trips.size() )
         throw InvalidProblem( "triplet row index out of range" );
      return m;
   }

   /// Appends a row given sorted, zero-free entries.
   void append_row( std::span<const Index> cols, std::span<const Real> vals )
   {
      if( offsets_.empty() )
         offsets_.push_back( 0 );
      cols_.insert( cols_.end(), cols.begin(), cols.end() );
      vals_.insert( vals_.end(), vals.begin(), vals.end() );
      offsets_.push_back( static_cast<Index>( cols_.size() ) );
      ++nrows_;
   }

   Index rows() const { return nrows_; }
   Index cols() const { return ncols_; }
   Index nnz() const { return static_cast<Index>( vals_.size() ); }
   void set_cols( Index n ) { ncols_ = n; }

   std::span<const Index> row_cols( Index r ) const
   {
      return { cols_.data() + offsets_[r], static_cast<std::size_t>( offsets_[r + 1] - offsets_[r] ) };
   }
   std::span<const Real> row_vals( Index r ) const
   {
      return { vals_.data() + offsets_[r], static_cast<std::size_t>( offsets_[r + 1] - offsets_[r] ) };
   }
   Index row_len( Index r ) const { return offsets_[r + 1] - offsets_[r]; }

   const std::vector<Index>& offsets() const { return offsets_; }
   const std::vector<Index>& indices() const { return cols_; }
   const std::vector<Real>& values() const { return vals_; }

   Real at( Index r, Index c ) const
   {
      auto cs = row_cols( r );
      auto it = std::lower_bound( cs.begin(), cs.end(), c );
      if( it == cs.end() || *it != c )
         return 0.0;
      return vals_[offsets_[r] + ( it - cs.begin() )];
   }

   /// Column-major view, returned as the CSR of the transpose.
   SparseMatrix transpose() const
   {
      SparseMatrix t( ncols_, nrows_ );
      std::vector<Index> count( ncols_ + 1, 0 );
      for( Index c : cols_ )
         ++count[c + 1];
      for( Index c = 0; c < ncols_; ++c )
         count[c + 1] += count[c];
      t.offsets_ = count;
      t.cols_.resize( cols_.size() );
      t.vals_.resize( vals_.size() );
      for( Index r = 0; r < nrows_; ++r )
         for( Index k = offsets_[r]; k < offsets_[r + 1]; ++k )
         {
            Index pos = count[cols_[k]]++;
            t.cols_[pos] = r;
            t.vals_[pos] = vals_[k];
         }
      return t;
   }

   std::vector<Triplet> triplets() const
   {
      std::vector<Triplet> out;
      out.reserve( vals_.size() );
      for( Index r = 0; r < nrows_; ++r )
         for( Index k = offsets_[r]; k < offsets_[r + 1]; ++k )
            out.push_back( { r, cols_[k], vals_[k] } );
      return out;
   }

   /// Empty string when all storage invariants hold.
   std::string check() const
   {
      if( static_cast<Index>( offsets_.size() ) != nrows_ + 1 )
         return "offset array length differs from row count + 1";
      if( offsets_.front() != 0 || offsets_.back() != nnz() )
         return "offsets do not span the entry arrays";
      for( Index r = 0; r < nrows_; ++r )
      {
         if( offsets_[r] > offsets_[r + 1] )
            return "offsets decrease at row " + std::to_string( r );
         for( Index k = offsets_[r]; k < offsets_[r + 1]; ++k )
         {
            if( cols_[k] < 0 || cols_[k] >= ncols_ )
               return "column index out of range in row " + std::to_string( r );
            if( k > offsets_[r] && cols_[k] <= cols_[k - 1] )
               return "unsorted row " + std::to_string( r );
            if( vals_[k] == 0.0 )
               return "explicit zero in row " + std::to_string( r );
         }
      }
      return {};
   }

   bool operator==( const SparseMatrix& o ) const
   {
      return nrows_ == o.nrows_ && ncols_ == o.ncols_ && offsets_ == o.offsets_ && cols_ == o.cols_ &&
             vals_ == o.vals_;
   }

 private:
   Index nrows_ = 0;
   Index ncols_ = 0;
   std::vector<Index> offsets_{ 0 };
   std::vector<Index> cols_;
   std::vector<Real> vals_;
};

} // namespace ahlp

#endif
