"""Ticketbot-lite: reduced-scale movie browsing and ticket booking domain.

Five APIs over eight entity types. FindMovies draws returns from a pool wider
than the static Movie catalog, so user re-mentions of returned titles exercise
the dynamic catalogue features.
"""

from __future__ import annotations

from ..dialogue import AnnotatedDialogue
from ..schema import DomainSchema, parse_domain
from .builder import DialogueBuilder

MOVIES = [
    "la la land", "joker", "the dark knight", "inception", "frozen", "coco",
    "dune", "interstellar", "up", "amelie", "parasite", "gravity",
]
MOVIE_RETURN_POOL = [
    "a star is born", "cold pursuit", "captain marvel", "dark phoenix",
    "knives out", "little women", "midsommar", "booksmart",
]
DURATIONS = [
    "1 hour 30 minutes", "1 hour 52 minutes", "2 hours", "2 hours 14 minutes",
    "2 hours 45 minutes", "95 minutes", "88 minutes",
]
CASTS = [
    "ryan gosling and emma stone", "joaquin phoenix", "christian bale",
    "leonardo dicaprio", "idina menzel", "timothee chalamet", "tom hanks",
]
DATES = ["today", "tomorrow", "saturday", "sunday", "monday", "friday", "june 8th", "next week"]
THEATERS = ["century cinemas", "regal palace station", "amc downtown", "grand lake theatre", "roxy cinema"]
SHOWTIMES = ["7:05 pm", "8 pm", "9:30 pm", "10:35 pm", "noon", "6:15 pm", "4:40 pm"]
TICKET_COUNTS = ["one", "two", "three", "four", "five", "six"]
BOOKINGS = ["ab12", "cd34", "ef56", "gh78", "jk90"]


def schema_doc() -> dict:
    return {
        "entity_types": [
            {"name": "Movie", "catalog": MOVIES, "return_pool": MOVIE_RETURN_POOL},
            {"name": "Duration", "catalog": DURATIONS},
            {"name": "Cast", "catalog": CASTS},
            {"name": "Date", "catalog": DATES},
            {"name": "Theater", "catalog": THEATERS},
            {"name": "Showtime", "catalog": SHOWTIMES},
            {"name": "TicketCount", "catalog": TICKET_COUNTS},
            {"name": "Booking", "catalog": BOOKINGS},
        ],
        "apis": [
            {
                "name": "FindMovies",
                "args": [
                    {"name": "date", "entity_type": "Date", "required": True, "multi_valued": False},
                    {"name": "theater", "entity_type": "Theater", "required": False, "multi_valued": False},
                ],
                "return_type": "Movie",
                "confirm_before_call": False,
                "return_sampler": "Movie",
            },
            {
                "name": "GetDuration",
                "args": [{"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False}],
                "return_type": "Duration",
                "confirm_before_call": False,
                "return_sampler": "Duration",
            },
            {
                "name": "GetCast",
                "args": [{"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False}],
                "return_type": "Cast",
                "confirm_before_call": False,
                "return_sampler": "Cast",
            },
            {
                "name": "FindShowtimes",
                "args": [
                    {"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False},
                    {"name": "date", "entity_type": "Date", "required": False, "multi_valued": False},
                ],
                "return_type": "Showtime",
                "confirm_before_call": False,
                "return_sampler": "Showtime",
            },
            {
                "name": "BuyTickets",
                "args": [
                    {"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False},
                    {"name": "showtime", "entity_type": "Showtime", "required": True, "multi_valued": False},
                    {"name": "numTickets", "entity_type": "TicketCount", "required": True, "multi_valued": False},
                ],
                "return_type": "Booking",
                "confirm_before_call": True,
                "return_sampler": "Booking",
            },
        ],
        "nlg_responses": [
            {"name": "welcome", "args": [], "template_texts": ["welcome to movie finder! how can i help?"], "acts": ["welcome"]},
            {
                "name": "inform_movie_duration",
                "args": [
                    {"name": "duration", "entity_type": "Duration", "required": True, "multi_valued": False},
                    {"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False},
                ],
                "template_texts": ["$movieTitle is $duration long", "$movieTitle runs for $duration"],
                "acts": ["notify_result(GetDuration)"],
            },
            {
                "name": "inform_movie_cast",
                "args": [
                    {"name": "cast", "entity_type": "Cast", "required": True, "multi_valued": False},
                    {"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False},
                ],
                "template_texts": ["$cast was in $movieTitle", "$movieTitle stars $cast"],
                "acts": ["notify_result(GetCast)"],
            },
            {
                "name": "inform_found_movie",
                "args": [
                    {"name": "movie", "entity_type": "Movie", "required": True, "multi_valued": False},
                    {"name": "date", "entity_type": "Date", "required": True, "multi_valued": False},
                ],
                "template_texts": ["i found $movie playing $date", "$movie is playing $date"],
                "acts": ["notify_result(FindMovies)"],
            },
            {
                "name": "inform_showtimes",
                "args": [
                    {"name": "showtime", "entity_type": "Showtime", "required": True, "multi_valued": False},
                    {"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False},
                ],
                "template_texts": ["$movieTitle is showing at $showtime", "there is a $showtime show for $movieTitle"],
                "acts": ["notify_result(FindShowtimes)"],
            },
            {
                "name": "notify_booked",
                "args": [
                    {"name": "booking", "entity_type": "Booking", "required": True, "multi_valued": False},
                    {"name": "numTickets", "entity_type": "TicketCount", "required": True, "multi_valued": False},
                ],
                "template_texts": ["done! $numTickets tickets booked, confirmation code $booking"],
                "acts": ["notify_result(BuyTickets)"],
            },
            {"name": "request_find_date", "args": [], "template_texts": ["for which date?", "when would you like to go?"], "acts": ["request(FindMovies.date)"]},
            {"name": "request_duration_movie", "args": [], "template_texts": ["which movie?", "for which movie?"], "acts": ["request(GetDuration.movieTitle)"]},
            {"name": "request_cast_movie", "args": [], "template_texts": ["whose cast? name the movie please"], "acts": ["request(GetCast.movieTitle)"]},
            {"name": "request_showtimes_movie", "args": [], "template_texts": ["showtimes for which movie?"], "acts": ["request(FindShowtimes.movieTitle)"]},
            {"name": "request_tickets_movie", "args": [], "template_texts": ["tickets for which movie?"], "acts": ["request(BuyTickets.movieTitle)"]},
            {"name": "request_tickets_showtime", "args": [], "template_texts": ["which showtime?", "for which showtime?"], "acts": ["request(BuyTickets.showtime)"]},
            {"name": "request_tickets_count", "args": [], "template_texts": ["how many tickets?"], "acts": ["request(BuyTickets.numTickets)"]},
            {
                "name": "confirm_booking",
                "args": [
                    {"name": "movieTitle", "entity_type": "Movie", "required": True, "multi_valued": False},
                    {"name": "showtime", "entity_type": "Showtime", "required": True, "multi_valued": False},
                    {"name": "numTickets", "entity_type": "TicketCount", "required": True, "multi_valued": False},
                ],
                "template_texts": [
                    "$numTickets tickets for $movieTitle at $showtime. should i book it?",
                    "booking $numTickets tickets for the $showtime show of $movieTitle, correct?",
                ],
                "acts": ["confirm(BuyTickets)"],
            },
            {"name": "no_result_showtimes", "args": [], "template_texts": ["sorry, i could not find any matching showtimes"], "acts": ["no_result(FindShowtimes)"]},
            {"name": "no_result_movies", "args": [], "template_texts": ["sorry, nothing seems to be playing then"], "acts": ["no_result(FindMovies)"]},
            {
                "name": "no_result_generic",
                "args": [],
                "template_texts": ["sorry, i could not find that"],
                "acts": ["no_result(GetDuration)", "no_result(GetCast)", "no_result(BuyTickets)"],
            },
            {"name": "offer_showtimes", "args": [], "template_texts": ["would you like showtimes for it?"], "acts": ["offer(FindShowtimes)"]},
            {"name": "offer_tickets", "args": [], "template_texts": ["shall i get you tickets?"], "acts": ["offer(BuyTickets)"]},
            {"name": "stop", "args": [], "template_texts": ["goodbye, enjoy the movie!"], "acts": ["bye"]},
            {"name": "cannot_handle", "args": [], "template_texts": ["sorry, i didn't get that"], "acts": ["cannot_handle"]},
        ],
        "user_templates": [
            {"text": "how long is $movieTitle", "acts": ["request(GetDuration)", "inform(GetDuration.movieTitle)"]},
            {"text": "how long is it", "acts": ["request(GetDuration)"]},
            {"text": "who stars in $movieTitle", "acts": ["request(GetCast)", "inform(GetCast.movieTitle)"]},
            {"text": "who stars in it", "acts": ["request(GetCast)"]},
            {"text": "what is playing $date", "acts": ["request(FindMovies)", "inform(FindMovies.date)"]},
            {
                "text": "what is playing at $theater $date",
                "acts": ["request(FindMovies)", "inform(FindMovies.date)", "inform(FindMovies.theater)"],
            },
            {"text": "what is playing", "acts": ["request(FindMovies)"]},
            {"text": "what are the showtimes for $movieTitle", "acts": ["request(FindShowtimes)", "inform(FindShowtimes.movieTitle)"]},
            {
                "text": "is $movieTitle playing $date",
                "acts": ["request(FindShowtimes)", "inform(FindShowtimes.movieTitle)", "inform(FindShowtimes.date)"],
            },
            {"text": "showtimes please", "acts": ["request(FindShowtimes)"]},
            {"text": "get me $numTickets tickets", "acts": ["request(BuyTickets)", "inform(BuyTickets.numTickets)"]},
            {
                "text": "get me $numTickets tickets for the $showtime show",
                "acts": ["request(BuyTickets)", "inform(BuyTickets.numTickets)", "inform(BuyTickets.showtime)"],
            },
            {"text": "book tickets", "acts": ["request(BuyTickets)"]},
            {"text": "$movieTitle", "acts": ["inform(GetDuration.movieTitle)"]},
            {"text": "$movieTitle", "acts": ["inform(GetCast.movieTitle)"]},
            {"text": "$movieTitle", "acts": ["inform(FindShowtimes.movieTitle)"]},
            {"text": "$movieTitle", "acts": ["inform(BuyTickets.movieTitle)"]},
            {"text": "$date", "acts": ["inform(FindMovies.date)"]},
            {"text": "$date", "acts": ["inform(FindShowtimes.date)"]},
            {"text": "at $theater", "acts": ["inform(FindMovies.theater)"]},
            {"text": "the $showtime show", "acts": ["inform(BuyTickets.showtime)"]},
            {"text": "$numTickets", "acts": ["inform(BuyTickets.numTickets)"]},
            {"text": "actually make it $numTickets tickets", "acts": ["correct(BuyTickets.numTickets)"]},
            {"text": "actually the $showtime show", "acts": ["correct(BuyTickets.showtime)"]},
            {"text": "actually make it $movieTitle", "acts": ["correct(BuyTickets.movieTitle)"]},
            {"text": "yes", "acts": ["affirm"]},
            {"text": "no", "acts": ["deny"]},
            {"text": "yes please", "acts": ["accept_offer"]},
            {"text": "no thanks", "acts": ["decline_offer"]},
            {"text": "exit", "acts": ["bye"]},
        ],
        "paraphrases": {
            "how long is $movieTitle": ["what is the runtime of $movieTitle", "how long does $movieTitle run"],
            "how long is it": ["what is the runtime", "wait, how long is it"],
            "who stars in $movieTitle": ["who is in $movieTitle", "who acts in $movieTitle"],
            "who stars in it": ["who is in it", "who acts in it"],
            "what is playing $date": ["what movies are on $date", "give me $date movies"],
            "what is playing at $theater $date": ["what is on at $theater $date"],
            "what are the showtimes for $movieTitle": ["when is $movieTitle playing", "showtimes for $movieTitle please"],
            "is $movieTitle playing $date": ["is $movieTitle on $date"],
            "get me $numTickets tickets": ["i want $numTickets tickets", "book $numTickets tickets"],
            "get me $numTickets tickets for the $showtime show": ["$numTickets tickets for the $showtime show please"],
            "book tickets": ["i want tickets", "buy tickets"],
            "$movieTitle": ["$movieTitle please"],
            "$date": ["on $date"],
            "the $showtime show": ["$showtime", "$showtime please"],
            "$numTickets": ["$numTickets tickets"],
            "actually make it $numTickets tickets": ["change it to $numTickets tickets"],
            "actually the $showtime show": ["actually make it the $showtime show"],
            "yes": ["yeah", "yep", "that is right", "correct"],
            "no": ["nope"],
            "yes please": ["sure", "sounds good", "ok"],
            "no thanks": ["no thank you", "not now"],
            "exit": ["goodbye", "that is all", "bye"],
        },
    }


def schema() -> DomainSchema:
    return parse_domain(schema_doc())


def seeds(s: DomainSchema | None = None) -> list[AnnotatedDialogue]:
    s = s or schema()
    out = []

    # 1. the classic: duration, then cast by anaphora, then exit
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("how long is [la la land|Movie|mt1|GetDuration.movieTitle]")
    b.api("GetDuration", {"movieTitle": "mt1"}, ret=("d1", "2 hours"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "mt1"}).end_turn()
    b.user("who stars in it")
    b.api("GetCast", {"movieTitle": "mt1"}, ret=("gcr1", "ryan gosling and emma stone"))
    b.nlg("inform_movie_cast", {"cast": "gcr1", "movieTitle": "mt1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # 2. browse, then ask about the returned title (dynamic catalogue pattern)
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what is playing [tomorrow|Date|dt1|FindMovies.date]")
    b.api("FindMovies", {"date": "dt1"}, ret=("m1", "a star is born"))
    b.nlg("inform_found_movie", {"movie": "m1", "date": "dt1"}).end_turn()
    b.user("how long is [a star is born|Movie|m2|GetDuration.movieTitle]")
    b.api("GetDuration", {"movieTitle": "m2"}, ret=("d1", "2 hours 14 minutes"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "m2"}).end_turn()
    b.user("goodbye").nlg("stop").end_dialogue()
    out.append(b.build())

    # 3. showtimes, then tickets for the returned time
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what are the showtimes for [joker|Movie|m1|FindShowtimes.movieTitle]")
    b.api("FindShowtimes", {"movieTitle": "m1"}, ret=("s1", "7:05 pm"))
    b.nlg("inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}).end_turn()
    b.user("get me [two|TicketCount|n1|BuyTickets.numTickets] tickets for the [7:05 pm|Showtime|s2|BuyTickets.showtime] show")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s2", "numTickets": "n1"}).end_turn()
    b.user("yes")
    b.api("BuyTickets", {"movieTitle": "m1", "showtime": "s2", "numTickets": "n1"}, ret=("bk1", "ab12"))
    b.nlg("notify_booked", {"booking": "bk1", "numTickets": "n1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # 4. tickets with every slot requested, corrected at the confirm
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("get me [three|TicketCount|n1|BuyTickets.numTickets] tickets")
    b.nlg("request_tickets_movie").end_turn()
    b.user("[inception|Movie|m1|BuyTickets.movieTitle]")
    b.nlg("request_tickets_showtime").end_turn()
    b.user("the [9:30 pm|Showtime|s1|BuyTickets.showtime] show")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}).end_turn()
    b.user("no actually make it [two|TicketCount|n2|BuyTickets.numTickets] tickets")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n2"}).end_turn()
    b.user("yes")
    b.api("BuyTickets", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n2"}, ret=("bk1", "cd34"))
    b.nlg("notify_booked", {"booking": "bk1", "numTickets": "n2"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # 5. browse at a theater, accept the showtimes offer, then book by carryover
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what is playing at [century cinemas|Theater|th1|FindMovies.theater] [tomorrow|Date|dt1|FindMovies.date]")
    b.api("FindMovies", {"date": "dt1", "theater": "th1"}, ret=("m1", "cold pursuit"))
    b.nlg("inform_found_movie", {"movie": "m1", "date": "dt1"})
    b.nlg("offer_showtimes").end_turn()
    b.user("yes please")
    b.api("FindShowtimes", {"movieTitle": "m1"}, ret=("s1", "8 pm"))
    b.nlg("inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}).end_turn()
    b.user("get me [four|TicketCount|n1|BuyTickets.numTickets] tickets")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}).end_turn()
    b.user("yes")
    b.api("BuyTickets", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}, ret=("bk1", "ef56"))
    b.nlg("notify_booked", {"booking": "bk1", "numTickets": "n1"}).end_turn()
    b.user("that is all").nlg("stop").end_dialogue()
    out.append(b.build())

    # 6. duration then showtimes for the same explicitly re-mentioned title
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("how long is [frozen|Movie|m1|GetDuration.movieTitle]")
    b.api("GetDuration", {"movieTitle": "m1"}, ret=("d1", "95 minutes"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "m1"}).end_turn()
    b.user("what are the showtimes for [frozen|Movie|m1|FindShowtimes.movieTitle]")
    b.api("FindShowtimes", {"movieTitle": "m1"}, ret=("s1", "noon"))
    b.nlg("inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}).end_turn()
    b.user("that is all").nlg("stop").end_dialogue()
    out.append(b.build())

    # 7. showtime lookup that fails
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("is [dune|Movie|m1|FindShowtimes.movieTitle] playing [sunday|Date|dt1|FindShowtimes.date]")
    b.api("FindShowtimes", {"movieTitle": "m1", "date": "dt1"}, success=False)
    b.nlg("no_result_showtimes").end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # 8. cast first, then duration carried over
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("who stars in [coco|Movie|m1|GetCast.movieTitle]")
    b.api("GetCast", {"movieTitle": "m1"}, ret=("c1", "tom hanks"))
    b.nlg("inform_movie_cast", {"cast": "c1", "movieTitle": "m1"}).end_turn()
    b.user("how long is it")
    b.api("GetDuration", {"movieTitle": "m1"}, ret=("d1", "1 hour 52 minutes"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "m1"}).end_turn()
    b.user("goodbye").nlg("stop").end_dialogue()
    out.append(b.build())

    return out


def challenge(s: DomainSchema | None = None) -> list[AnnotatedDialogue]:
    s = s or schema()
    out = []

    def simple_lookup(api: str, tpl: str, movie: str, ret_var: str, ret_val: str, nlg: str, nlg_args):
        b = DialogueBuilder(s)
        b.nlg("welcome").end_turn()
        b.user(tpl.format(m=f"[{movie}|Movie|m1|{api}.movieTitle]"))
        b.api(api, {"movieTitle": "m1"}, ret=(ret_var, ret_val))
        b.nlg(nlg, nlg_args).end_turn()
        b.user("exit").nlg("stop").end_dialogue()
        return b.build()

    out.append(simple_lookup("GetDuration", "how long is {m}", "joker", "d1", "2 hours 14 minutes",
                             "inform_movie_duration", {"duration": "d1", "movieTitle": "m1"}))
    out.append(simple_lookup("GetCast", "who stars in {m}", "parasite", "c1", "joaquin phoenix",
                             "inform_movie_cast", {"cast": "c1", "movieTitle": "m1"}))
    out.append(simple_lookup("FindShowtimes", "what are the showtimes for {m}", "gravity", "s1", "6:15 pm",
                             "inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}))

    # anaphora chains of three lookups
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("how long is [interstellar|Movie|m1|GetDuration.movieTitle]")
    b.api("GetDuration", {"movieTitle": "m1"}, ret=("d1", "2 hours 45 minutes"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "m1"}).end_turn()
    b.user("who stars in it")
    b.api("GetCast", {"movieTitle": "m1"}, ret=("c1", "leonardo dicaprio"))
    b.nlg("inform_movie_cast", {"cast": "c1", "movieTitle": "m1"}).end_turn()
    b.user("what are the showtimes for [interstellar|Movie|m1|FindShowtimes.movieTitle]")
    b.api("FindShowtimes", {"movieTitle": "m1"}, ret=("s1", "9:30 pm"))
    b.nlg("inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("who stars in [up|Movie|m1|GetCast.movieTitle]")
    b.api("GetCast", {"movieTitle": "m1"}, ret=("c1", "idina menzel"))
    b.nlg("inform_movie_cast", {"cast": "c1", "movieTitle": "m1"}).end_turn()
    b.user("how long is it")
    b.api("GetDuration", {"movieTitle": "m1"}, ret=("d1", "88 minutes"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "m1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # dynamic catalogue: browse then re-mention the returned (out-of-catalog) title
    def dynamic_flow(date: str, pool_movie: str, follow_api: str, follow_tpl: str, ret_var: str,
                     ret_val: str, nlg: str, nlg_args):
        b = DialogueBuilder(s)
        b.nlg("welcome").end_turn()
        b.user(f"what is playing [{date}|Date|dt1|FindMovies.date]")
        b.api("FindMovies", {"date": "dt1"}, ret=("m1", pool_movie))
        b.nlg("inform_found_movie", {"movie": "m1", "date": "dt1"}).end_turn()
        b.user(follow_tpl.format(m=f"[{pool_movie}|Movie|m2|{follow_api}.movieTitle]"))
        b.api(follow_api, {"movieTitle": "m2"}, ret=(ret_var, ret_val))
        b.nlg(nlg, nlg_args).end_turn()
        b.user("goodbye").nlg("stop").end_dialogue()
        return b.build()

    out.append(dynamic_flow("saturday", "knives out", "GetDuration", "how long is {m}", "d1",
                            "2 hours 14 minutes", "inform_movie_duration", {"duration": "d1", "movieTitle": "m2"}))
    out.append(dynamic_flow("friday", "midsommar", "FindShowtimes", "what are the showtimes for {m}", "s1",
                            "10:35 pm", "inform_showtimes", {"showtime": "s1", "movieTitle": "m2"}))
    out.append(dynamic_flow("today", "booksmart", "GetCast", "who stars in {m}", "c1",
                            "timothee chalamet", "inform_movie_cast", {"cast": "c1", "movieTitle": "m2"}))
    out.append(dynamic_flow("monday", "captain marvel", "FindShowtimes", "is {m} playing [monday|Date|dt2|FindShowtimes.date]", "s1",
                            "4:40 pm", "inform_showtimes", {"showtime": "s1", "movieTitle": "m2"}))

    # booking flows with corrections on each slot
    def booking_flow(upfront: str, movie: str, showtime: str, count: str,
                     correction: tuple[str, str, str] | None, booking: str):
        b = DialogueBuilder(s)
        b.nlg("welcome").end_turn()
        bindings = {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}
        if upfront == "count":
            b.user(f"get me [{count}|TicketCount|n1|BuyTickets.numTickets] tickets")
            b.nlg("request_tickets_movie").end_turn()
            b.user(f"[{movie}|Movie|m1|BuyTickets.movieTitle]")
            b.nlg("request_tickets_showtime").end_turn()
            b.user(f"the [{showtime}|Showtime|s1|BuyTickets.showtime] show")
        else:
            b.user("book tickets")
            b.nlg("request_tickets_movie").end_turn()
            b.user(f"[{movie}|Movie|m1|BuyTickets.movieTitle]")
            b.nlg("request_tickets_showtime").end_turn()
            b.user(f"the [{showtime}|Showtime|s1|BuyTickets.showtime] show")
            b.nlg("request_tickets_count").end_turn()
            b.user(f"[{count}|TicketCount|n1|BuyTickets.numTickets]")
        b.nlg("confirm_booking", dict(bindings)).end_turn()
        if correction:
            slot, marked, var = correction
            b.user(marked)
            bindings[slot] = var
            b.nlg("confirm_booking", dict(bindings)).end_turn()
        b.user("yes")
        b.api("BuyTickets", dict(bindings), ret=("bk1", booking))
        b.nlg("notify_booked", {"booking": "bk1", "numTickets": bindings["numTickets"]}).end_turn()
        b.user("exit").nlg("stop").end_dialogue()
        return b.build()

    out.append(booking_flow("count", "dune", "8 pm", "two", None, "ab12"))
    out.append(booking_flow("none", "amelie", "noon", "five", None, "cd34"))
    out.append(booking_flow("count", "coco", "4:40 pm", "three",
                            ("numTickets", "no actually make it [four|TicketCount|n2|BuyTickets.numTickets] tickets", "n2"), "ef56"))
    out.append(booking_flow("none", "joker", "7:05 pm", "two",
                            ("showtime", "actually the [9:30 pm|Showtime|s2|BuyTickets.showtime] show", "s2"), "gh78"))
    out.append(booking_flow("count", "frozen", "noon", "six",
                            ("movieTitle", "no actually make it [coco|Movie|m2|BuyTickets.movieTitle]", "m2"), "jk90"))

    # showtimes then booking with carryover of movie and showtime
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what are the showtimes for [the dark knight|Movie|m1|FindShowtimes.movieTitle]")
    b.api("FindShowtimes", {"movieTitle": "m1"}, ret=("s1", "9:30 pm"))
    b.nlg("inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}).end_turn()
    b.user("get me [two|TicketCount|n1|BuyTickets.numTickets] tickets")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}).end_turn()
    b.user("yes")
    b.api("BuyTickets", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}, ret=("bk1", "ab12"))
    b.nlg("notify_booked", {"booking": "bk1", "numTickets": "n1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # browse with theater, offer accepted, booking corrected
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what is playing at [roxy cinema|Theater|th1|FindMovies.theater] [friday|Date|dt1|FindMovies.date]")
    b.api("FindMovies", {"date": "dt1", "theater": "th1"}, ret=("m1", "little women"))
    b.nlg("inform_found_movie", {"movie": "m1", "date": "dt1"})
    b.nlg("offer_showtimes").end_turn()
    b.user("yes please")
    b.api("FindShowtimes", {"movieTitle": "m1"}, ret=("s1", "6:15 pm"))
    b.nlg("inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}).end_turn()
    b.user("get me [two|TicketCount|n1|BuyTickets.numTickets] tickets")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}).end_turn()
    b.user("no actually make it [three|TicketCount|n2|BuyTickets.numTickets] tickets")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n2"}).end_turn()
    b.user("yes")
    b.api("BuyTickets", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n2"}, ret=("bk1", "cd34"))
    b.nlg("notify_booked", {"booking": "bk1", "numTickets": "n2"}).end_turn()
    b.user("that is all").nlg("stop").end_dialogue()
    out.append(b.build())

    # offer declined
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what is playing [sunday|Date|dt1|FindMovies.date]")
    b.api("FindMovies", {"date": "dt1"}, ret=("m1", "inception"))
    b.nlg("inform_found_movie", {"movie": "m1", "date": "dt1"})
    b.nlg("offer_showtimes").end_turn()
    b.user("no thanks")
    b.end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # failure then a successful retry on another date
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("is [amelie|Movie|m1|FindShowtimes.movieTitle] playing [today|Date|dt1|FindShowtimes.date]")
    b.api("FindShowtimes", {"movieTitle": "m1", "date": "dt1"}, success=False)
    b.nlg("no_result_showtimes").end_turn()
    b.user("is [amelie|Movie|m1|FindShowtimes.movieTitle] playing [saturday|Date|dt2|FindShowtimes.date]")
    b.api("FindShowtimes", {"movieTitle": "m1", "date": "dt2"}, ret=("s1", "7:05 pm"))
    b.nlg("inform_showtimes", {"showtime": "s1", "movieTitle": "m1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # find movies that fails
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what is playing [next week|Date|dt1|FindMovies.date]")
    b.api("FindMovies", {"date": "dt1"}, success=False)
    b.nlg("no_result_movies").end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # date requested for a browse
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("what is playing")
    b.nlg("request_find_date").end_turn()
    b.user("[tomorrow|Date|dt1|FindMovies.date]")
    b.api("FindMovies", {"date": "dt1"}, ret=("m1", "dune"))
    b.nlg("inform_found_movie", {"movie": "m1", "date": "dt1"}).end_turn()
    b.user("how long is it")
    b.api("GetDuration", {"movieTitle": "m1"}, ret=("d1", "2 hours 45 minutes"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "m1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # duration for a movie that was never browsed, then booking it
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("how long is [gravity|Movie|m1|GetDuration.movieTitle]")
    b.api("GetDuration", {"movieTitle": "m1"}, ret=("d1", "1 hour 30 minutes"))
    b.nlg("inform_movie_duration", {"duration": "d1", "movieTitle": "m1"}).end_turn()
    b.user("get me [two|TicketCount|n1|BuyTickets.numTickets] tickets for the [8 pm|Showtime|s1|BuyTickets.showtime] show")
    b.nlg("confirm_booking", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}).end_turn()
    b.user("yes")
    b.api("BuyTickets", {"movieTitle": "m1", "showtime": "s1", "numTickets": "n1"}, ret=("bk1", "gh78"))
    b.nlg("notify_booked", {"booking": "bk1", "numTickets": "n1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    return out
