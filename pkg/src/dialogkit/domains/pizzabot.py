"""Pizzabot: the bundled pizza-ordering example domain.

Three APIs (OrderPizza, OrderDrink, CancelOrder) over six entity types, seven
seed dialogues, and a hand-written challenge set exercising corrections,
over/under-cooperation, offers and multi-value slots.
"""

from __future__ import annotations

from ..dialogue import AnnotatedDialogue
from ..schema import DomainSchema, parse_domain
from .builder import DialogueBuilder

TOPPINGS = [
    "olives", "tomatoes", "green peppers", "mushrooms", "onions",
    "pepperoni", "bacon", "pineapple", "spinach", "anchovies",
]
CRUSTS = ["thin", "thick", "stuffed", "regular", "gluten free"]
CHEESES = ["extra", "regular", "light", "no cheese", "vegan"]
SIZES = ["small", "medium", "large", "extra large"]
DRINKS = ["coke", "diet coke", "sprite", "lemonade", "water", "root beer"]
PRICES = ["$5.99", "$8.49", "$10.99", "$12.49", "$15.75", "$18.20", "$21.00"]


def schema_doc() -> dict:
    return {
        "entity_types": [
            {"name": "Topping", "catalog": TOPPINGS},
            {"name": "Crust", "catalog": CRUSTS},
            {"name": "Cheese", "catalog": CHEESES},
            {"name": "Size", "catalog": SIZES},
            {"name": "Drink", "catalog": DRINKS},
            {"name": "Price", "catalog": PRICES},
        ],
        "apis": [
            {
                "name": "OrderPizza",
                "args": [
                    {"name": "toppingsList", "entity_type": "Topping", "required": True, "multi_valued": True},
                    {"name": "crust", "entity_type": "Crust", "required": True, "multi_valued": False},
                    {"name": "cheese", "entity_type": "Cheese", "required": True, "multi_valued": False},
                    {"name": "size", "entity_type": "Size", "required": True, "multi_valued": False},
                ],
                "return_type": "Price",
                "confirm_before_call": True,
                "return_sampler": "Price",
            },
            {
                "name": "OrderDrink",
                "args": [
                    {"name": "drink", "entity_type": "Drink", "required": True, "multi_valued": False},
                    {"name": "size", "entity_type": "Size", "required": True, "multi_valued": False},
                ],
                "return_type": "Price",
                "confirm_before_call": True,
                "return_sampler": "Price",
            },
            {
                "name": "CancelOrder",
                "args": [],
                "return_type": None,
                "confirm_before_call": True,
                "return_sampler": None,
            },
        ],
        "nlg_responses": [
            {"name": "welcome", "args": [], "template_texts": ["welcome to pizza palace! what can i get you?"], "acts": ["welcome"]},
            {"name": "request_toppings", "args": [], "template_texts": ["what would you like on your pizza?", "which toppings should i put on it?"], "acts": ["request(OrderPizza.toppingsList)"]},
            {"name": "request_crust", "args": [], "template_texts": ["what kind of crust would you like?", "which crust should it be?"], "acts": ["request(OrderPizza.crust)"]},
            {"name": "request_cheese", "args": [], "template_texts": ["how much cheese?", "what kind of cheese would you like?"], "acts": ["request(OrderPizza.cheese)"]},
            {"name": "request_size", "args": [], "template_texts": ["what size pizza?", "which size would you like?"], "acts": ["request(OrderPizza.size)"]},
            {"name": "request_drink", "args": [], "template_texts": ["which drink would you like?", "what can i get you to drink?"], "acts": ["request(OrderDrink.drink)"]},
            {"name": "request_drink_size", "args": [], "template_texts": ["what size drink?", "which size for the drink?"], "acts": ["request(OrderDrink.size)"]},
            {
                "name": "confirm_pizza",
                "args": [
                    {"name": "toppingsList", "entity_type": "Topping", "required": True, "multi_valued": True},
                    {"name": "crust", "entity_type": "Crust", "required": True, "multi_valued": False},
                    {"name": "cheese", "entity_type": "Cheese", "required": True, "multi_valued": False},
                    {"name": "size", "entity_type": "Size", "required": True, "multi_valued": False},
                ],
                "template_texts": [
                    "so far i have a $size $toppingsList pizza on $crust crust with $cheese cheese. is that correct?",
                    "one $size pizza with $toppingsList, $crust crust, $cheese cheese. shall i place it?",
                ],
                "acts": ["confirm(OrderPizza)"],
            },
            {
                "name": "confirm_drink",
                "args": [
                    {"name": "drink", "entity_type": "Drink", "required": True, "multi_valued": False},
                    {"name": "size", "entity_type": "Size", "required": True, "multi_valued": False},
                ],
                "template_texts": ["one $size $drink, is that correct?", "a $size $drink, right?"],
                "acts": ["confirm(OrderDrink)"],
            },
            {"name": "confirm_cancel", "args": [], "template_texts": ["are you sure you want to cancel your order?"], "acts": ["confirm(CancelOrder)"]},
            {
                "name": "notify_pizza_ordered",
                "args": [{"name": "total", "entity_type": "Price", "required": True, "multi_valued": False}],
                "template_texts": ["great! i placed your order for a total of $total", "done, your pizza is on its way. that will be $total"],
                "acts": ["notify_result(OrderPizza)"],
            },
            {
                "name": "notify_drink_added",
                "args": [{"name": "total", "entity_type": "Price", "required": True, "multi_valued": False}],
                "template_texts": ["drink added, your new total is $total", "got it, the drink brings your total to $total"],
                "acts": ["notify_result(OrderDrink)"],
            },
            {"name": "notify_cancelled", "args": [], "template_texts": ["your order has been cancelled"], "acts": ["notify_result(CancelOrder)"]},
            {
                "name": "no_result_order",
                "args": [],
                "template_texts": ["sorry, i could not place that order right now"],
                "acts": ["no_result(OrderPizza)", "no_result(OrderDrink)", "no_result(CancelOrder)"],
            },
            {"name": "offer_drink", "args": [], "template_texts": ["would you like a drink with that?"], "acts": ["offer(OrderDrink)"]},
            {"name": "stop", "args": [], "template_texts": ["thanks for stopping by, goodbye!"], "acts": ["bye"]},
            {"name": "cannot_handle", "args": [], "template_texts": ["sorry, i didn't get that"], "acts": ["cannot_handle"]},
        ],
        "user_templates": [
            {"text": "i want to order a pizza", "acts": ["request(OrderPizza)"]},
            {"text": "i want to order a $size pizza", "acts": ["request(OrderPizza)", "inform(OrderPizza.size)"]},
            {"text": "i want a pizza with $toppingsList", "acts": ["request(OrderPizza)", "inform(OrderPizza.toppingsList)"]},
            {
                "text": "i want a $size pizza with $toppingsList",
                "acts": ["request(OrderPizza)", "inform(OrderPizza.size)", "inform(OrderPizza.toppingsList)"],
            },
            {
                "text": "i want a $size pizza with $toppingsList on $crust crust with $cheese cheese",
                "acts": [
                    "request(OrderPizza)",
                    "inform(OrderPizza.size)",
                    "inform(OrderPizza.toppingsList)",
                    "inform(OrderPizza.crust)",
                    "inform(OrderPizza.cheese)",
                ],
            },
            {"text": "$toppingsList", "acts": ["inform(OrderPizza.toppingsList)"]},
            {"text": "$toppingsList with $crust crust", "acts": ["inform(OrderPizza.toppingsList)", "inform(OrderPizza.crust)"]},
            {
                "text": "$toppingsList with $crust crust and $cheese cheese",
                "acts": ["inform(OrderPizza.toppingsList)", "inform(OrderPizza.crust)", "inform(OrderPizza.cheese)"],
            },
            {"text": "$crust crust", "acts": ["inform(OrderPizza.crust)"]},
            {"text": "$cheese cheese", "acts": ["inform(OrderPizza.cheese)"]},
            {"text": "$size", "acts": ["inform(OrderPizza.size)"]},
            {"text": "actually make it $size", "acts": ["correct(OrderPizza.size)"]},
            {"text": "actually make it $crust crust", "acts": ["correct(OrderPizza.crust)"]},
            {"text": "actually $cheese cheese instead", "acts": ["correct(OrderPizza.cheese)"]},
            {"text": "actually make it $toppingsList", "acts": ["correct(OrderPizza.toppingsList)"]},
            {"text": "i want to order a drink", "acts": ["request(OrderDrink)"]},
            {"text": "i want a $drink", "acts": ["request(OrderDrink)", "inform(OrderDrink.drink)"]},
            {"text": "i want a $size $drink", "acts": ["request(OrderDrink)", "inform(OrderDrink.size)", "inform(OrderDrink.drink)"]},
            {"text": "$drink", "acts": ["inform(OrderDrink.drink)"]},
            {"text": "$size", "acts": ["inform(OrderDrink.size)"]},
            {"text": "actually make the drink $size", "acts": ["correct(OrderDrink.size)"]},
            {"text": "actually make it a $drink", "acts": ["correct(OrderDrink.drink)"]},
            {"text": "cancel my order", "acts": ["request(CancelOrder)"]},
            {"text": "yes", "acts": ["affirm"]},
            {"text": "no", "acts": ["deny"]},
            {"text": "yes please", "acts": ["accept_offer"]},
            {"text": "no thanks", "acts": ["decline_offer"]},
            {"text": "exit", "acts": ["bye"]},
        ],
        "paraphrases": {
            "i want to order a pizza": ["can i get a pizza", "i would like to order a pizza please",
                                        "let me order a pizza", "hi, one pizza order", "could you start a pizza for me"],
            "i want to order a $size pizza": ["can i get a $size pizza", "i would like a $size pizza",
                                              "one $size pizza please", "could i have a $size pizza",
                                              "hello, a $size pizza for me"],
            "i want a pizza with $toppingsList": ["get me a pizza with $toppingsList", "a pizza with $toppingsList please",
                                                  "could i order a pizza topped with $toppingsList",
                                                  "one pizza carrying $toppingsList"],
            "i want a $size pizza with $toppingsList": ["get me a $size pizza with $toppingsList",
                                                        "one $size pizza topped with $toppingsList",
                                                        "could i do a $size pie with $toppingsList"],
            "$toppingsList": ["i will have $toppingsList", "put $toppingsList on it", "$toppingsList please",
                              "let us do $toppingsList", "how about $toppingsList", "top it with $toppingsList",
                              "give it $toppingsList", "throw on $toppingsList"],
            "$toppingsList with $crust crust": ["$toppingsList on $crust", "do $toppingsList and $crust crust"],
            "$crust crust": ["$crust please", "make it $crust crust", "i prefer $crust crust",
                             "let us go with $crust", "$crust sounds good", "do the $crust one",
                             "$crust works for me"],
            "$cheese cheese": ["$cheese cheese please", "go with $cheese cheese", "i will take $cheese cheese",
                               "$cheese is fine", "do $cheese on it", "let us say $cheese",
                               "$cheese would be great"],
            "$size": ["make it $size", "$size please", "a $size one", "$size works",
                      "let us go $size", "i am thinking $size"],
            "actually make it $size": ["actually, $size instead", "no wait, make that $size", "change it to $size",
                                       "hold on, $size please", "scratch that, $size",
                                       "sorry, could you do $size instead"],
            "actually make it $crust crust": ["change the crust to $crust", "on second thought, $crust crust",
                                              "switch it to $crust crust", "sorry, $crust crust instead"],
            "actually $cheese cheese instead": ["change that to $cheese cheese", "make the cheese $cheese instead",
                                                "sorry, go with $cheese cheese"],
            "actually make it $toppingsList": ["change the toppings to $toppingsList", "make that $toppingsList instead",
                                               "swap the toppings for $toppingsList",
                                               "sorry, i would rather have $toppingsList"],
            "i want to order a drink": ["can i get a drink", "add a drink", "something to drink too please"],
            "i want a $drink": ["get me a $drink", "add a $drink", "a $drink please", "i could use a $drink",
                                "throw in a $drink"],
            "i want a $size $drink": ["a $size $drink please", "add a $size $drink"],
            "$drink": ["$drink please", "the $drink", "make it a $drink", "pour me a $drink"],
            "actually make the drink $size": ["change the drink to $size", "make that drink $size"],
            "actually make it a $drink": ["switch the drink to a $drink", "on second thought, a $drink"],
            "cancel my order": ["actually cancel my order", "please cancel the order", "forget the order"],
            "yes": ["yeah", "yep", "that is right", "correct"],
            "no": ["nope", "no, that is wrong"],
            "yes please": ["sure", "sounds good", "ok why not"],
            "no thanks": ["no thank you", "i am good", "nothing else"],
            "exit": ["goodbye", "that is all", "bye", "i am done"],
        },
    }


def schema() -> DomainSchema:
    return parse_domain(schema_doc())


def _order_tail(b: DialogueBuilder, toppings_vars, crust_var, cheese_var, size_var, price: str):
    b.nlg("confirm_pizza", {"toppingsList": toppings_vars, "crust": crust_var, "cheese": cheese_var, "size": size_var})
    b.end_turn()
    b.user("yes")
    b.api(
        "OrderPizza",
        {"toppingsList": toppings_vars, "crust": crust_var, "cheese": cheese_var, "size": size_var},
        ret=("p1", price),
    )
    b.nlg("notify_pizza_ordered", {"total": "p1"})


def seeds(s: DomainSchema | None = None) -> list[AnnotatedDialogue]:
    s = s or schema()
    out = []

    # 1. bare invocation; every slot requested one by one
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want to order a pizza")
    b.nlg("request_toppings").end_turn()
    b.user("[mushrooms|Topping|t1|OrderPizza.toppingsList] and [onions|Topping|t2|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[thick|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[regular|Cheese|ch1|OrderPizza.cheese] cheese")
    b.nlg("request_size").end_turn()
    b.user("[medium|Size|z1|OrderPizza.size]")
    _order_tail(b, ["t1", "t2"], "c1", "ch1", "z1", "$12.49")
    b.end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # 2. size up front, over-cooperative answer, correction at the confirm
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want to order a [large|Size|z1|OrderPizza.size] pizza")
    b.nlg("request_toppings").end_turn()
    b.user(
        "[olives|Topping|t1|OrderPizza.toppingsList], [tomatoes|Topping|t2|OrderPizza.toppingsList] and "
        "[green peppers|Topping|t3|OrderPizza.toppingsList] with [thin|Crust|c1|OrderPizza.crust] crust and "
        "[extra|Cheese|ch1|OrderPizza.cheese] cheese"
    )
    b.nlg("confirm_pizza", {"toppingsList": ["t1", "t2", "t3"], "crust": "c1", "cheese": "ch1", "size": "z1"})
    b.end_turn()
    b.user("no actually make it [small|Size|z2|OrderPizza.size]")
    b.nlg("confirm_pizza", {"toppingsList": ["t1", "t2", "t3"], "crust": "c1", "cheese": "ch1", "size": "z2"})
    b.end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t1", "t2", "t3"], "crust": "c1", "cheese": "ch1", "size": "z2"}, ret=("p1", "$15.75"))
    b.nlg("notify_pizza_ordered", {"total": "p1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # 3. pizza then offered drink, accepted
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a [medium|Size|z1|OrderPizza.size] pizza with [pepperoni|Topping|t1|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[regular|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[light|Cheese|ch1|OrderPizza.cheese] cheese")
    _order_tail(b, ["t1"], "c1", "ch1", "z1", "$10.99")
    b.nlg("offer_drink").end_turn()
    b.user("yes please")
    b.nlg("request_drink").end_turn()
    b.user("[sprite|Drink|d1|OrderDrink.drink]")
    b.nlg("request_drink_size").end_turn()
    b.user("[small|Size|z2|OrderDrink.size]")
    b.nlg("confirm_drink", {"drink": "d1", "size": "z2"}).end_turn()
    b.user("yes")
    b.api("OrderDrink", {"drink": "d1", "size": "z2"}, ret=("p2", "$12.49"))
    b.nlg("notify_drink_added", {"total": "p2"}).end_turn()
    b.user("that is all").nlg("stop").end_dialogue()
    out.append(b.build())

    # 4. drink on its own
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a [coke|Drink|d1|OrderDrink.drink]")
    b.nlg("request_drink_size").end_turn()
    b.user("[large|Size|z1|OrderDrink.size]")
    b.nlg("confirm_drink", {"drink": "d1", "size": "z1"}).end_turn()
    b.user("yes")
    b.api("OrderDrink", {"drink": "d1", "size": "z1"}, ret=("p1", "$5.99"))
    b.nlg("notify_drink_added", {"total": "p1"}).end_turn()
    b.user("goodbye").nlg("stop").end_dialogue()
    out.append(b.build())

    # 5. one-shot fully specified order
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user(
        "i want a [small|Size|z1|OrderPizza.size] pizza with [spinach|Topping|t1|OrderPizza.toppingsList] and "
        "[bacon|Topping|t2|OrderPizza.toppingsList] on [stuffed|Crust|c1|OrderPizza.crust] crust with "
        "[vegan|Cheese|ch1|OrderPizza.cheese] cheese"
    )
    _order_tail(b, ["t1", "t2"], "c1", "ch1", "z1", "$18.20")
    b.end_turn()
    b.user("bye").nlg("stop").end_dialogue()
    out.append(b.build())

    # 6. order then cancel
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a [large|Size|z1|OrderPizza.size] pizza with [anchovies|Topping|t1|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[thin|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[no cheese|Cheese|ch1|OrderPizza.cheese] cheese")
    _order_tail(b, ["t1"], "c1", "ch1", "z1", "$12.49")
    b.end_turn()
    b.user("cancel my order")
    b.nlg("confirm_cancel").end_turn()
    b.user("yes")
    b.api("CancelOrder", {})
    b.nlg("notify_cancelled").end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # 7. toppings informed up front, corrected at the confirm
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a pizza with [pineapple|Topping|t1|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[gluten free|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[extra|Cheese|ch1|OrderPizza.cheese] cheese")
    b.nlg("request_size").end_turn()
    b.user("[extra large|Size|z1|OrderPizza.size]")
    b.nlg("confirm_pizza", {"toppingsList": ["t1"], "crust": "c1", "cheese": "ch1", "size": "z1"})
    b.end_turn()
    b.user("no actually make it [mushrooms|Topping|t2|OrderPizza.toppingsList] and [olives|Topping|t3|OrderPizza.toppingsList]")
    b.nlg("confirm_pizza", {"toppingsList": ["t2", "t3"], "crust": "c1", "cheese": "ch1", "size": "z1"})
    b.end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t2", "t3"], "crust": "c1", "cheese": "ch1", "size": "z1"}, ret=("p1", "$21.00"))
    b.nlg("notify_pizza_ordered", {"total": "p1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    return out


def challenge(s: DomainSchema | None = None) -> list[AnnotatedDialogue]:
    """Hand-written evaluation dialogues: corrections on every slot, offers
    accepted and declined, one-shot and fully-requested orders, drink flows."""
    s = s or schema()
    out = []

    def pizza_flow(informs: dict, requested: list[str], values: dict, correction: tuple[str, str, str] | None,
                   price: str, offer_and: str | None = None, drink: tuple[str, str, str] | None = None):
        """One pizza order. values: slot -> marked value spec."""
        b = DialogueBuilder(s)
        b.nlg("welcome").end_turn()
        topping_vars = [f"t{i}" for i in range(len(values["toppings"]))]
        inv = "i want to order a pizza"
        if informs.get("size") and informs.get("toppings"):
            tops = " and ".join(
                f"[{v}|Topping|{topping_vars[i]}|OrderPizza.toppingsList]" for i, v in enumerate(values["toppings"])
            )
            inv = f"i want a [{values['size']}|Size|z1|OrderPizza.size] pizza with {tops}"
        elif informs.get("size"):
            inv = f"i want to order a [{values['size']}|Size|z1|OrderPizza.size] pizza"
        elif informs.get("toppings"):
            tops = " and ".join(
                f"[{v}|Topping|{topping_vars[i]}|OrderPizza.toppingsList]" for i, v in enumerate(values["toppings"])
            )
            inv = f"i want a pizza with {tops}"
        b.user(inv)
        for slot in requested:
            if slot == "toppings":
                b.nlg("request_toppings").end_turn()
                tops = ", ".join(
                    f"[{v}|Topping|{topping_vars[i]}|OrderPizza.toppingsList]" for i, v in enumerate(values["toppings"])
                )
                b.user(tops)
            elif slot == "crust":
                b.nlg("request_crust").end_turn()
                b.user(f"[{values['crust']}|Crust|c1|OrderPizza.crust] crust")
            elif slot == "cheese":
                b.nlg("request_cheese").end_turn()
                b.user(f"[{values['cheese']}|Cheese|ch1|OrderPizza.cheese] cheese")
            elif slot == "size":
                b.nlg("request_size").end_turn()
                b.user(f"[{values['size']}|Size|z1|OrderPizza.size]")
        bindings = {"toppingsList": topping_vars, "crust": "c1", "cheese": "ch1", "size": "z1"}
        b.nlg("confirm_pizza", dict(bindings)).end_turn()
        if correction:
            slot, new_value, var = correction
            type_name = {"size": "Size", "crust": "Crust", "cheese": "Cheese"}[slot]
            suffix = " crust" if slot == "crust" else (" cheese instead" if slot == "cheese" else "")
            lead = "no actually make it" if slot != "cheese" else "no actually"
            mark = f"[{new_value}|{type_name}|{var}|OrderPizza.{slot}]"
            b.user(f"{lead} {mark}{suffix}")
            bindings[{"size": "size", "crust": "crust", "cheese": "cheese"}[slot]] = var
            b.nlg("confirm_pizza", dict(bindings)).end_turn()
        b.user("yes")
        b.api("OrderPizza", dict(bindings), ret=("p1", price))
        b.nlg("notify_pizza_ordered", {"total": "p1"})
        if offer_and is not None:
            b.nlg("offer_drink").end_turn()
            if offer_and == "decline":
                b.user("no thanks")
                b.end_turn()
            else:
                b.user("yes please")
                dname, dsize, dprice = drink
                b.nlg("request_drink").end_turn()
                b.user(f"[{dname}|Drink|d1|OrderDrink.drink]")
                b.nlg("request_drink_size").end_turn()
                b.user(f"[{dsize}|Size|z9|OrderDrink.size]")
                b.nlg("confirm_drink", {"drink": "d1", "size": "z9"}).end_turn()
                b.user("yes")
                b.api("OrderDrink", {"drink": "d1", "size": "z9"}, ret=("p2", dprice))
                b.nlg("notify_drink_added", {"total": "p2"}).end_turn()
        else:
            b.end_turn()
        b.user("exit").nlg("stop").end_dialogue()
        return b.build()

    vals = lambda tops, crust, cheese, size: {"toppings": tops, "crust": crust, "cheese": cheese, "size": size}

    out.append(pizza_flow({}, ["toppings", "crust", "cheese", "size"], vals(["olives"], "thin", "extra", "small"), None, "$8.49"))
    out.append(pizza_flow({"size": True}, ["toppings", "crust", "cheese"], vals(["bacon", "onions"], "thick", "light", "large"), None, "$15.75"))
    out.append(pizza_flow({"toppings": True}, ["crust", "cheese", "size"], vals(["spinach"], "regular", "regular", "medium"), None, "$10.99"))
    out.append(pizza_flow({"size": True, "toppings": True}, ["crust", "cheese"], vals(["pepperoni", "mushrooms"], "stuffed", "vegan", "extra large"), None, "$21.00"))
    out.append(pizza_flow({}, ["toppings", "crust", "cheese", "size"], vals(["anchovies"], "gluten free", "no cheese", "small"), ("size", "large", "z2"), "$12.49"))
    out.append(pizza_flow({"size": True}, ["toppings", "crust", "cheese"], vals(["tomatoes"], "thin", "extra", "medium"), ("crust", "thick", "c2"), "$10.99"))
    out.append(pizza_flow({"size": True, "toppings": True}, ["crust", "cheese"], vals(["green peppers", "olives"], "regular", "light", "small"), ("cheese", "extra", "ch2"), "$12.49"))
    out.append(pizza_flow({"toppings": True}, ["crust", "cheese", "size"], vals(["pineapple", "bacon", "onions"], "thick", "regular", "large"), None, "$18.20", offer_and="decline"))
    out.append(pizza_flow({"size": True}, ["toppings", "crust", "cheese"], vals(["mushrooms"], "thin", "vegan", "small"), None, "$8.49", offer_and="accept", drink=("lemonade", "medium", "$10.99")))
    out.append(pizza_flow({"size": True, "toppings": True}, ["crust", "cheese"], vals(["olives", "spinach", "tomatoes"], "stuffed", "extra", "extra large"), ("size", "medium", "z2"), "$15.75", offer_and="accept", drink=("root beer", "large", "$18.20")))

    # drink-only flows
    def drink_flow(informed: bool, dname: str, dsize: str, price: str, correct_size: str | None = None):
        b = DialogueBuilder(s)
        b.nlg("welcome").end_turn()
        if informed:
            b.user(f"i want a [{dname}|Drink|d1|OrderDrink.drink]")
        else:
            b.user("i want to order a drink")
            b.nlg("request_drink").end_turn()
            b.user(f"[{dname}|Drink|d1|OrderDrink.drink]")
        b.nlg("request_drink_size").end_turn()
        b.user(f"[{dsize}|Size|z1|OrderDrink.size]")
        bindings = {"drink": "d1", "size": "z1"}
        b.nlg("confirm_drink", dict(bindings)).end_turn()
        if correct_size:
            b.user(f"no actually make the drink [{correct_size}|Size|z2|OrderDrink.size]")
            bindings["size"] = "z2"
            b.nlg("confirm_drink", dict(bindings)).end_turn()
        b.user("yes")
        b.api("OrderDrink", dict(bindings), ret=("p1", price))
        b.nlg("notify_drink_added", {"total": "p1"}).end_turn()
        b.user("exit").nlg("stop").end_dialogue()
        return b.build()

    out.append(drink_flow(True, "diet coke", "small", "$5.99"))
    out.append(drink_flow(False, "water", "large", "$5.99"))
    out.append(drink_flow(True, "sprite", "medium", "$8.49", correct_size="large"))

    # cancel flows
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a [small|Size|z1|OrderPizza.size] pizza with [olives|Topping|t0|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[thin|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[regular|Cheese|ch1|OrderPizza.cheese] cheese")
    b.nlg("confirm_pizza", {"toppingsList": ["t0"], "crust": "c1", "cheese": "ch1", "size": "z1"}).end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t0"], "crust": "c1", "cheese": "ch1", "size": "z1"}, ret=("p1", "$8.49"))
    b.nlg("notify_pizza_ordered", {"total": "p1"}).end_turn()
    b.user("cancel my order")
    b.nlg("confirm_cancel").end_turn()
    b.user("yes")
    b.api("CancelOrder", {})
    b.nlg("notify_cancelled").end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # correction delivered without a leading deny
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want to order a [medium|Size|z1|OrderPizza.size] pizza")
    b.nlg("request_toppings").end_turn()
    b.user("[onions|Topping|t0|OrderPizza.toppingsList] and [tomatoes|Topping|t1|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[regular|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[light|Cheese|ch1|OrderPizza.cheese] cheese")
    b.nlg("confirm_pizza", {"toppingsList": ["t0", "t1"], "crust": "c1", "cheese": "ch1", "size": "z1"}).end_turn()
    b.user("actually make it [small|Size|z2|OrderPizza.size]")
    b.nlg("confirm_pizza", {"toppingsList": ["t0", "t1"], "crust": "c1", "cheese": "ch1", "size": "z2"}).end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t0", "t1"], "crust": "c1", "cheese": "ch1", "size": "z2"}, ret=("p1", "$10.99"))
    b.nlg("notify_pizza_ordered", {"total": "p1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # four-topping over-cooperative single shot
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user(
        "i want a [large|Size|z1|OrderPizza.size] pizza with [olives|Topping|t0|OrderPizza.toppingsList], "
        "[mushrooms|Topping|t1|OrderPizza.toppingsList], [bacon|Topping|t2|OrderPizza.toppingsList] and "
        "[pineapple|Topping|t3|OrderPizza.toppingsList] on [thin|Crust|c1|OrderPizza.crust] crust with "
        "[extra|Cheese|ch1|OrderPizza.cheese] cheese"
    )
    b.nlg("confirm_pizza", {"toppingsList": ["t0", "t1", "t2", "t3"], "crust": "c1", "cheese": "ch1", "size": "z1"}).end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t0", "t1", "t2", "t3"], "crust": "c1", "cheese": "ch1", "size": "z1"}, ret=("p1", "$21.00"))
    b.nlg("notify_pizza_ordered", {"total": "p1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # a pizza and a separately requested drink in one conversation
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a [small|Size|z1|OrderPizza.size] pizza with [pepperoni|Topping|t0|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[thick|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[extra|Cheese|ch1|OrderPizza.cheese] cheese")
    b.nlg("confirm_pizza", {"toppingsList": ["t0"], "crust": "c1", "cheese": "ch1", "size": "z1"}).end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t0"], "crust": "c1", "cheese": "ch1", "size": "z1"}, ret=("p1", "$10.99"))
    b.nlg("notify_pizza_ordered", {"total": "p1"}).end_turn()
    b.user("i want a [large|Size|z2|OrderDrink.size] [coke|Drink|d1|OrderDrink.drink]")
    b.nlg("confirm_drink", {"drink": "d1", "size": "z2"}).end_turn()
    b.user("yes")
    b.api("OrderDrink", {"drink": "d1", "size": "z2"}, ret=("p2", "$12.49"))
    b.nlg("notify_drink_added", {"total": "p2"}).end_turn()
    b.user("goodbye").nlg("stop").end_dialogue()
    out.append(b.build())

    # two corrections in one order (size then crust)
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want to order a [large|Size|z1|OrderPizza.size] pizza")
    b.nlg("request_toppings").end_turn()
    b.user("[spinach|Topping|t0|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[thin|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[regular|Cheese|ch1|OrderPizza.cheese] cheese")
    b.nlg("confirm_pizza", {"toppingsList": ["t0"], "crust": "c1", "cheese": "ch1", "size": "z1"}).end_turn()
    b.user("no actually make it [medium|Size|z2|OrderPizza.size]")
    b.nlg("confirm_pizza", {"toppingsList": ["t0"], "crust": "c1", "cheese": "ch1", "size": "z2"}).end_turn()
    b.user("actually make it [stuffed|Crust|c2|OrderPizza.crust] crust")
    b.nlg("confirm_pizza", {"toppingsList": ["t0"], "crust": "c2", "cheese": "ch1", "size": "z2"}).end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t0"], "crust": "c2", "cheese": "ch1", "size": "z2"}, ret=("p1", "$15.75"))
    b.nlg("notify_pizza_ordered", {"total": "p1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    # drink first, then a pizza
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a [medium|Size|z1|OrderDrink.size] [lemonade|Drink|d1|OrderDrink.drink]")
    b.nlg("confirm_drink", {"drink": "d1", "size": "z1"}).end_turn()
    b.user("yes")
    b.api("OrderDrink", {"drink": "d1", "size": "z1"}, ret=("p1", "$5.99"))
    b.nlg("notify_drink_added", {"total": "p1"}).end_turn()
    b.user("i want a pizza with [tomatoes|Topping|t0|OrderPizza.toppingsList] and [olives|Topping|t1|OrderPizza.toppingsList]")
    b.nlg("request_crust").end_turn()
    b.user("[gluten free|Crust|c1|OrderPizza.crust] crust")
    b.nlg("request_cheese").end_turn()
    b.user("[vegan|Cheese|ch1|OrderPizza.cheese] cheese")
    b.nlg("request_size").end_turn()
    b.user("[small|Size|z2|OrderPizza.size]")
    b.nlg("confirm_pizza", {"toppingsList": ["t0", "t1"], "crust": "c1", "cheese": "ch1", "size": "z2"}).end_turn()
    b.user("yes")
    b.api("OrderPizza", {"toppingsList": ["t0", "t1"], "crust": "c1", "cheese": "ch1", "size": "z2"}, ret=("p2", "$12.49"))
    b.nlg("notify_pizza_ordered", {"total": "p2"}).end_turn()
    b.user("that is all").nlg("stop").end_dialogue()
    out.append(b.build())

    # the drink itself corrected at the confirm
    b = DialogueBuilder(s)
    b.nlg("welcome").end_turn()
    b.user("i want a [small|Size|z1|OrderDrink.size] [water|Drink|d1|OrderDrink.drink]")
    b.nlg("confirm_drink", {"drink": "d1", "size": "z1"}).end_turn()
    b.user("no actually make it a [root beer|Drink|d2|OrderDrink.drink]")
    b.nlg("confirm_drink", {"drink": "d2", "size": "z1"}).end_turn()
    b.user("yes")
    b.api("OrderDrink", {"drink": "d2", "size": "z1"}, ret=("p1", "$5.99"))
    b.nlg("notify_drink_added", {"total": "p1"}).end_turn()
    b.user("exit").nlg("stop").end_dialogue()
    out.append(b.build())

    return out
