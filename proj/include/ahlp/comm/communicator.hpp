#ifndef AHLP_COMM_COMMUNICATOR_HPP
#define AHLP_COMM_COMMUNICATOR_HPP

#include "ahlp/core.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <typeindex>
#include <typeinfo>
#include <vector>

namespace ahlp
{

enum class ExecMode
{
   Lockstep, ///< one rank executes at a time, round-robin between collectives
   Threaded  ///< every rank runs on its own worker thread
};

enum class FoldOrder
{
   RankAscending, ///< reproducible folds regardless of scheduling
   Arrival        ///< fold in arrival order (threaded fast path, not reproducible)
};

inline const char* to_string( ExecMode m ) { return m == ExecMode::Lockstep ? "lockstep" : "threaded"; }

/// Binary reduction with an identity. `commutative_associative` is a declaration
/// made by the caller; the communicator does not rely on it when folding in rank
/// order.
template <typename T>
struct ReduceOperator
{
   T identity;
   std::function<T( const T&, const T& )> combine;
   bool commutative_associative = true;
};

namespace ops
{

template <typename T>
ReduceOperator<T> sum()
{
   return { T{}, []( const T& a, const T& b ) { return a + b; }, true };
}

template <typename T>
ReduceOperator<T> min()
{
   T id = std::numeric_limits<T>::has_infinity ? std::numeric_limits<T>::infinity() : std::numeric_limits<T>::max();
   return { id, []( const T& a, const T& b ) { return b < a ? b : a; }, true };
}

template <typename T>
ReduceOperator<T> max()
{
   T id = std::numeric_limits<T>::has_infinity ? -std::numeric_limits<T>::infinity()
                                               : std::numeric_limits<T>::lowest();
   return { id, []( const T& a, const T& b ) { return a < b ? b : a; }, true };
}

inline ReduceOperator<std::uint8_t> logical_and()
{
   return { 1, []( const std::uint8_t& a, const std::uint8_t& b ) -> std::uint8_t { return a && b; }, true };
}

inline ReduceOperator<std::uint8_t> logical_or()
{
   return { 0, []( const std::uint8_t& a, const std::uint8_t& b ) -> std::uint8_t { return a || b; }, true };
}

inline ReduceOperator<std::uint64_t> wrapping_add()
{
   return { 0, []( const std::uint64_t& a, const std::uint64_t& b ) { return a + b; }, true };
}

} // namespace ops

class Communicator;

namespace detail
{

/// Rendezvous state shared by all ranks of one run.
class World
{
 public:
   World( int size, ExecMode mode, FoldOrder order )
       : size_( size ), mode_( mode ), order_( order ), slots_( size ), outputs_( size ), finished_( size, 0 ),
         seq_( size, 0 )
   {
   }

   int size() const { return size_; }
   ExecMode mode() const { return mode_; }

   struct Slot
   {
      const void* data = nullptr;
      std::type_index type = typeid( void );
      std::string call;
      std::string tag;
      std::size_t length = 0;
      int arrival = 0;
   };

   using Completer = std::function<void( const std::vector<Slot>&, std::vector<std::shared_ptr<void>>& )>;

   /// Blocks until every rank has entered the matching call; the last arriving
   /// rank runs `complete` on the posted slots.
   std::shared_ptr<void> collective( int rank, Slot slot, bool check_length, const Completer& complete )
   {
      std::unique_lock lock( mutex_ );
      throw_if_faulted( rank );
      const std::uint64_t my_seq = seq_[rank]++;
      slot.arrival = arrived_;
      slots_[rank] = std::move( slot );
      ++arrived_;

      if( finished_count_ > 0 )
         raise( rank, my_seq, slots_[rank].call, "a rank returned without entering this collective" );

      if( arrived_ < size_ )
      {
         const std::uint64_t gen = generation_;
         if( mode_ == ExecMode::Lockstep )
            pass_turn( rank );
         cv_.wait( lock, [&] { return generation_ != gen || fault_; } );
         throw_if_faulted( rank );
      }
      else
      {
         for( int r = 0; r < size_; ++r )
         {
            const Slot& s = slots_[r];
            if( s.call != slots_[0].call || s.type != slots_[0].type || s.tag != slots_[0].tag )
               raise( r, my_seq, s.call + "[" + s.tag + "]",
                      "diverges from rank 0 call " + slots_[0].call + "[" + slots_[0].tag + "]" );
            if( check_length && s.length != slots_[0].length )
               raise( r, my_seq, s.call,
                      "buffer length " + std::to_string( s.length ) + " differs from rank 0 length " +
                          std::to_string( slots_[0].length ) );
         }
         complete( slots_, outputs_ );
         arrived_ = 0;
         ++generation_;
         if( mode_ == ExecMode::Lockstep )
            turn_ = first_active();
         cv_.notify_all();
      }
      if( mode_ == ExecMode::Lockstep )
      {
         cv_.wait( lock, [&] { return turn_ == rank || fault_; } );
         throw_if_faulted( rank );
      }
      return std::move( outputs_[rank] );
   }

   FoldOrder fold_order() const { return order_; }

   void start( int rank )
   {
      if( mode_ != ExecMode::Lockstep )
         return;
      std::unique_lock lock( mutex_ );
      cv_.wait( lock, [&] { return turn_ == rank || fault_; } );
   }

   void finish( int rank, std::exception_ptr error )
   {
      std::unique_lock lock( mutex_ );
      finished_[rank] = 1;
      ++finished_count_;
      if( error && !fault_ )
      {
         fault_ = true;
         first_error_ = error;
      }
      else if( arrived_ > 0 && !fault_ )
      {
         fault_ = true;
         first_error_ = std::make_exception_ptr(
             ProtocolFault( rank, seq_[rank], "exit", "rank returned while other ranks wait in a collective" ) );
      }
      if( mode_ == ExecMode::Lockstep && turn_ == rank )
         pass_turn( rank );
      cv_.notify_all();
   }

   std::exception_ptr first_error() const { return first_error_; }

 private:
   void pass_turn( int rank )
   {
      for( int k = 1; k <= size_; ++k )
      {
         int next = ( rank + k ) % size_;
         if( !finished_[next] )
         {
            turn_ = next;
            cv_.notify_all();
            return;
         }
      }
      turn_ = -1;
   }

   int first_active() const
   {
      for( int r = 0; r < size_; ++r )
         if( !finished_[r] )
            return r;
      return -1;
   }

   [[noreturn]] void raise( int rank, std::uint64_t seq, const std::string& call, const std::string& what )
   {
      fault_ = true;
      ProtocolFault fault( rank, seq, call, what );
      if( !first_error_ )
         first_error_ = std::make_exception_ptr( fault );
      cv_.notify_all();
      throw fault;
   }

   void throw_if_faulted( int rank )
   {
      if( !fault_ )
         return;
      try
      {
         std::rethrow_exception( first_error_ );
      }
      catch( const ProtocolFault& f )
      {
         throw ProtocolFault( f );
      }
      catch( ... )
      {
         throw ProtocolFault( rank, seq_[rank], "abort", "another rank terminated with an error" );
      }
   }

   int size_;
   ExecMode mode_;
   FoldOrder order_;
   std::mutex mutex_;
   std::condition_variable cv_;
   std::vector<Slot> slots_;
   std::vector<std::shared_ptr<void>> outputs_;
   std::vector<char> finished_;
   std::vector<std::uint64_t> seq_;
   int arrived_ = 0;
   int finished_count_ = 0;
   std::uint64_t generation_ = 0;
   int turn_ = 0;
   bool fault_ = false;
   std::exception_ptr first_error_;
};

} // namespace detail

/// Handle a rank uses to take part in collectives. Every call is a blocking
/// rendezvous: it returns only after all ranks entered the same call at the
/// same sequence position.
class Communicator
{
 public:
   Communicator( detail::World* world, int rank ) : world_( world ), rank_( rank ) {}

   int rank() const { return rank_; }
   int size() const { return world_ ? world_->size() : 1; }
   ExecMode mode() const { return world_ ? world_->mode() : ExecMode::Lockstep; }

   /// Elementwise fold of all ranks' buffers; every rank receives the result.
   template <typename T>
   std::vector<T> allreduce( const std::vector<T>& buf, const ReduceOperator<T>& op, const std::string& tag = {} )
   {
      if( !world_ )
      {
         std::vector<T> out( buf.size(), op.identity );
         for( std::size_t k = 0; k < buf.size(); ++k )
            out[k] = op.combine( op.identity, buf[k] );
         return out;
      }
      detail::World::Slot slot;
      slot.data = &buf;
      slot.type = typeid( std::vector<T> );
      slot.call = "allreduce";
      slot.tag = tag;
      slot.length = buf.size();
      const FoldOrder order = world_->fold_order();
      auto res = world_->collective(
          rank_, std::move( slot ), true,
          [&op, order]( const std::vector<detail::World::Slot>& slots, std::vector<std::shared_ptr<void>>& outs ) {
             const std::size_t n = slots[0].length;
             std::vector<int> ranks( slots.size() );
             for( std::size_t r = 0; r < slots.size(); ++r )
                ranks[r] = static_cast<int>( r );
             if( order == FoldOrder::Arrival )
                std::sort( ranks.begin(), ranks.end(),
                           [&]( int a, int b ) { return slots[a].arrival < slots[b].arrival; } );
             auto folded = std::make_shared<std::vector<T>>( n, op.identity );
             for( int r : ranks )
             {
                const auto& in = *static_cast<const std::vector<T>*>( slots[r].data );
                for( std::size_t k = 0; k < n; ++k )
                   ( *folded )[k] = op.combine( ( *folded )[k], in[k] );
             }
             for( auto& o : outs )
                o = folded;
          } );
      return *static_cast<std::vector<T>*>( res.get() );
   }

   template <typename T>
   T allreduce( const T& value, const ReduceOperator<T>& op, const std::string& tag = {} )
   {
      return allreduce( std::vector<T>{ value }, op, tag ).front();
   }

   /// Variable-length gather; result is rank0 ++ rank1 ++ ... on every rank.
   template <typename T>
   std::vector<T> allgather( const std::vector<T>& local, const std::string& tag = {} )
   {
      std::vector<T> out;
      for( auto& part : allgather_parts( local, tag ) )
         out.insert( out.end(), std::make_move_iterator( part.begin() ), std::make_move_iterator( part.end() ) );
      return out;
   }

   /// Like allgather but keeps the per-rank partition.
   template <typename T>
   std::vector<std::vector<T>> allgather_parts( const std::vector<T>& local, const std::string& tag = {} )
   {
      if( !world_ )
         return { local };
      detail::World::Slot slot;
      slot.data = &local;
      slot.type = typeid( std::vector<T> );
      slot.call = "allgather";
      slot.tag = tag;
      slot.length = local.size();
      auto res = world_->collective(
          rank_, std::move( slot ), false,
          []( const std::vector<detail::World::Slot>& slots, std::vector<std::shared_ptr<void>>& outs ) {
             auto parts = std::make_shared<std::vector<std::vector<T>>>();
             for( const auto& s : slots )
                parts->push_back( *static_cast<const std::vector<T>*>( s.data ) );
             for( auto& o : outs )
                o = parts;
          } );
      return *static_cast<std::vector<std::vector<T>>*>( res.get() );
   }

   void barrier( const std::string& tag = {} )
   {
      if( !world_ )
         return;
      detail::World::Slot slot;
      slot.call = "barrier";
      slot.tag = tag;
      world_->collective( rank_, std::move( slot ), false,
                          []( const std::vector<detail::World::Slot>&, std::vector<std::shared_ptr<void>>& ) {} );
   }

 private:
   detail::World* world_;
   int rank_;
};

/// Communicator for a single-rank run without any threading.
inline Communicator self_communicator() { return Communicator( nullptr, 0 ); }

/// Runs `body(comm)` on `size` logical ranks and waits for all of them.
/// The first error raised by any rank (protocol faults included) is rethrown.
inline void run_ranks( int size, ExecMode mode, const std::function<void( Communicator& )>& body,
                       FoldOrder order = FoldOrder::RankAscending )
{
   if( size < 1 )
      throw std::invalid_argument( "rank count must be positive" );
   detail::World world( size, mode, order );
   std::vector<std::thread> workers;
   workers.reserve( size );
   for( int r = 0; r < size; ++r )
      workers.emplace_back( [&world, &body, r] {
         std::exception_ptr err;
         try
         {
            world.start( r );
            Communicator comm( &world, r );
            body( comm );
         }
         catch( ... )
         {
            err = std::current_exception();
         }
         world.finish( r, err );
      } );
   for( auto& w : workers )
      w.join();
   if( auto e = world.first_error() )
      std::rethrow_exception( e );
}

} // namespace ahlp

#endif
