"""Regenerate the benchmark pack, the scripted mock and the seed dataset.

    python3 scripts/build_fixtures.py

Writes bench/*.json, fixtures/happy.script, fixtures/bench_config.json and
data/seed_examples.jsonl. Every crash below is planted by hand; the mock
replies are written so that the generated inputs reach it (except for the
alarm app, which stays undetected on purpose).
"""

from __future__ import annotations

import json
from pathlib import Path

from guifuzz.llm import render_generator_response, render_valid_input_response
from guifuzz.model import CATALOG

ROOT = Path(__file__).resolve().parents[1]

# short names for the catalog entries a spec exercises
C = dict(
    zip(
        ["pure_text", "pure_digits", "decimal", "date", "currency",
         "length", "char_class", "unique", "non_negative", "range",
         "less_than", "sum", "date_before", "equal", "non_equal", "dependent", "format_consistency"],
        [e.description for e in CATALOG],
    )
)


def cats(*names: str) -> list[str]:
    return [C[n] for n in names]


def text_view_page(activity: str) -> dict:
    return {"activity_name": activity, "title": activity}


def w(wid: str, descriptor: str, *neighbors: str, cls: str | None = None) -> dict:
    d = {"id": wid, "descriptor": descriptor, "neighbors": list(neighbors)}
    if cls:
        d["class"] = cls
    return d


SPECS = [
    {
        "app_name": "FontSize",
        "categories": cats("decimal", "non_negative", "range"),
        "pages": [
            {
                "activity_name": "SettingsActivity",
                "title": "Display settings",
                "widgets": [w("w_size", "Font size", "Text size (pt)")],
                "rules": [
                    {"kind": "must_parse_decimal", "widget": "w_size", "hint_text": "Enter a number"},
                    {"kind": "max_value", "widget": "w_size", "value": 72, "hint_text": "Font size must be at most 72",
                     "visibility": "explicit"},
                ],
                "crashes": [{"crash_id": "negative_font_size", "condition": ["<", ["num", "w_size"], 0],
                             "message": "IllegalArgumentException: negative text size"}],
                "success_transition": "PreviewActivity",
            },
            text_view_page("PreviewActivity"),
        ],
    },
    {
        "app_name": "Shopping",
        "categories": cats("currency", "less_than"),
        "pages": [
            {
                "activity_name": "PriceFilterActivity",
                "title": "Filter by price",
                "widgets": [w("w_min", "Minimum price", "From", "$"), w("w_max", "Maximum price", "To", "$")],
                "rules": [
                    {"kind": "must_parse_decimal", "widget": "w_min", "hint_text": "Enter a valid price"},
                    {"kind": "must_parse_decimal", "widget": "w_max", "hint_text": "Enter a valid price"},
                ],
                "crashes": [{"crash_id": "inverted_price_range",
                             "condition": [">", ["num", "w_min"], ["num", "w_max"]],
                             "message": "IndexOutOfBoundsException in price histogram"}],
                "success_transition": "ResultsActivity",
            },
            text_view_page("ResultsActivity"),
        ],
    },
    {
        "app_name": "HealthLog",
        "categories": cats("pure_digits", "less_than"),
        "pages": [
            {
                "activity_name": "BloodPressureActivity",
                "title": "Record blood pressure",
                "widgets": [w("w_sys", "Systolic pressure", "Systolic", "mmHg"),
                            w("w_dia", "Diastolic pressure", "Diastolic", "mmHg")],
                "rules": [
                    {"kind": "must_parse_int", "widget": "w_sys", "hint_text": "Please enter a whole number"},
                    {"kind": "must_parse_int", "widget": "w_dia", "hint_text": "Please enter a whole number"},
                    {"kind": "less_than", "widget": "w_dia", "other": "w_sys",
                     "hint_text": "The diastolic pressure should be lower than systolic pressure"},
                ],
                "crashes": [{"crash_id": "zero_pulse_pressure", "condition": ["equals", "w_sys", "w_dia"],
                             "message": "ArithmeticException: divide by zero"}],
                "success_transition": "HistoryActivity",
            },
            text_view_page("HistoryActivity"),
        ],
    },
    {
        "app_name": "SecureVault",
        "categories": cats("length", "char_class", "unique"),
        "pages": [
            {
                "activity_name": "RegisterActivity",
                "title": "Create account",
                "widgets": [w("w_user", "Username", "Choose a username"),
                            w("w_pass", "Password", "Choose a password")],
                "rules": [
                    {"kind": "unique_in", "widget": "w_user", "value": ["admin", "root", "guest"],
                     "hint_text": "Username already in use"},
                    {"kind": "min_len", "widget": "w_pass", "value": 8,
                     "hint_text": "Password must be at least 8 characters", "visibility": "explicit"},
                    {"kind": "requires_class", "widget": "w_pass", "value": "upper",
                     "hint_text": "at least one upper case character (A-Z) is required"},
                ],
                "crashes": [{"crash_id": "format_string_in_password",
                             "condition": ["contains_class", "w_pass", "format_specifier"],
                             "message": "UnknownFormatConversionException"}],
                "success_transition": "WelcomeActivity",
            },
            text_view_page("WelcomeActivity"),
        ],
    },
    {
        "app_name": "BillSplit",
        "categories": cats("decimal", "sum"),
        "pages": [
            {
                "activity_name": "SplitActivity",
                "title": "Split a bill",
                "widgets": [w("w_total", "Total amount", "Bill total"),
                            w("w_p1", "First share", "Person 1 pays"),
                            w("w_p2", "Second share", "Person 2 pays")],
                "rules": [
                    {"kind": "must_parse_decimal", "widget": "w_total", "hint_text": "Enter an amount"},
                    {"kind": "must_parse_decimal", "widget": "w_p1", "hint_text": "Enter an amount"},
                    {"kind": "must_parse_decimal", "widget": "w_p2", "hint_text": "Enter an amount"},
                    {"kind": "sum_equals", "total": "w_total", "widgets": ["w_p1", "w_p2"],
                     "hint_text": "Shares must add up to the total"},
                ],
                "crashes": [{"crash_id": "negative_remainder",
                             "condition": [">", ["+", ["num", "w_p1"], ["num", "w_p2"]], ["num", "w_total"]],
                             "message": "IllegalStateException: negative remainder"}],
                "success_transition": "SummaryActivity",
            },
            text_view_page("SummaryActivity"),
        ],
    },
    {
        "app_name": "Flights",
        "categories": cats("pure_text", "date", "date_before", "non_equal"),
        "pages": [
            {
                "activity_name": "SearchActivity",
                "title": "Search flights",
                "widgets": [w("w_from", "Departure city", "From"),
                            w("w_to", "Arrival city", "To"),
                            w("w_depart", "Departure date", "Depart", "YYYY-MM-DD"),
                            w("w_return", "Return date", "Return", "YYYY-MM-DD")],
                "rules": [
                    {"kind": "pure_text", "widget": "w_from", "hint_text": "City name must contain letters only"},
                    {"kind": "non_equal", "widget": "w_to", "other": "w_from",
                     "hint_text": "Departure and arrival city must differ"},
                    {"kind": "date_before", "widget": "w_depart", "other": "w_return",
                     "hint_text": "Return date must be after departure date"},
                ],
                "crashes": [{"crash_id": "negative_trip_length", "condition": ["date_before", "w_return", "w_depart"],
                             "message": "DateTimeException: negative duration"}],
                "success_transition": "ResultsActivity",
            },
            text_view_page("ResultsActivity"),
        ],
    },
    {
        "app_name": "Currency",
        "categories": cats("currency", "length"),
        "pages": [
            {
                "activity_name": "ConverterActivity",
                "title": "Convert currency",
                "widgets": [w("w_amount", "Amount", "USD", "to EUR")],
                "rules": [{"kind": "must_parse_decimal", "widget": "w_amount", "hint_text": "Enter a valid amount"}],
                "crashes": [{"crash_id": "amount_overflow", "condition": ["len_exceeds", "w_amount", 18],
                             "message": "NumberFormatException: value out of range"}],
                "success_transition": "RateActivity",
            },
            text_view_page("RateActivity"),
        ],
    },
    {
        "app_name": "Messenger",
        "categories": cats("pure_text", "length"),
        "pages": [
            {
                "activity_name": "ComposeActivity",
                "title": "New message",
                "widgets": [w("w_to", "Recipient", "To"), w("w_msg", "Message", "Type a message")],
                "rules": [{"kind": "min_len", "widget": "w_msg", "value": 1, "hint_text": "Message cannot be empty"}],
                "crashes": [{"crash_id": "bidi_layout_crash", "condition": ["contains_class", "w_msg", "rtl_override"],
                             "message": "IndexOutOfBoundsException in StaticLayout"}],
                "success_transition": "ThreadActivity",
            },
            text_view_page("ThreadActivity"),
        ],
    },
    {
        "app_name": "Contacts",
        "categories": cats("pure_digits", "equal", "format_consistency"),
        "pages": [
            {
                "activity_name": "AddContactActivity",
                "title": "Add contact",
                "widgets": [w("w_name", "Name", "Contact name"),
                            w("w_phone", "Phone number", "Phone"),
                            w("w_phone2", "Confirm phone number", "Repeat phone")],
                "rules": [
                    {"kind": "pure_digits", "widget": "w_phone", "hint_text": "Phone number may only contain digits"},
                    {"kind": "equals", "widget": "w_phone2", "other": "w_phone",
                     "hint_text": "Phone numbers do not match"},
                ],
                "crashes": [{"crash_id": "phone_int_overflow",
                             "condition": ["and", ["not", ["violates", {"kind": "pure_digits", "widget": "w_phone"}]],
                                           ["unguarded_parse", "w_phone", "int"]],
                             "message": "NumberFormatException: For input string"}],
                "success_transition": "ContactActivity",
            },
            text_view_page("ContactActivity"),
        ],
    },
    {
        "app_name": "Notes",
        "categories": cats("pure_text"),
        "pages": [
            {
                "activity_name": "SearchActivity",
                "title": "Search notes",
                "widgets": [w("w_query", "Search notes", "Search", cls="android.widget.SearchView")],
                "rules": [{"kind": "forbids_chars", "widget": "w_query", "value": "<>",
                           "hint_text": "Invalid characters in search"}],
                "crashes": [{"crash_id": "sql_injection_crash", "condition": ["contains_class", "w_query", "sql_meta"],
                             "message": "SQLiteException: unrecognized token"}],
                "success_transition": "ResultsActivity",
            },
            text_view_page("ResultsActivity"),
        ],
    },
    {
        "app_name": "Fitness",
        "categories": cats("decimal", "non_negative", "range"),
        "pages": [
            {
                "activity_name": "BmiActivity",
                "title": "Body mass index",
                "widgets": [w("w_height", "Height", "Height", "cm"), w("w_weight", "Weight", "Weight", "kg")],
                "rules": [
                    {"kind": "must_parse_decimal", "widget": "w_height", "hint_text": "Enter your height"},
                    {"kind": "must_parse_decimal", "widget": "w_weight", "hint_text": "Enter your weight"},
                    {"kind": "min_value", "widget": "w_height", "value": 0, "hint_text": "Height cannot be negative"},
                    {"kind": "max_value", "widget": "w_height", "value": 300,
                     "hint_text": "Height must be at most 300 cm"},
                ],
                "crashes": [{"crash_id": "bmi_division_by_zero", "condition": ["==", ["num", "w_height"], 0],
                             "message": "ArithmeticException: divide by zero"}],
                "success_transition": "ResultActivity",
            },
            text_view_page("ResultActivity"),
        ],
    },
    {
        "app_name": "Alarm",
        "categories": cats("range", "dependent"),
        "pages": [
            {
                "activity_name": "AlarmActivity",
                "title": "Set alarm",
                "widgets": [w("w_hour", "Hour", "Hour (0-23)"), w("w_minute", "Minute", "Minute (0-59)"),
                            w("w_label", "Label", "Alarm label")],
                "rules": [
                    {"kind": "must_parse_int", "widget": "w_hour", "hint_text": "Hour must be a number"},
                    {"kind": "must_parse_int", "widget": "w_minute", "hint_text": "Minute must be a number"},
                    {"kind": "min_value", "widget": "w_hour", "value": 0, "hint_text": "Hour must be between 0 and 23"},
                    {"kind": "max_value", "widget": "w_hour", "value": 23, "hint_text": "Hour must be between 0 and 23"},
                    {"kind": "min_value", "widget": "w_minute", "value": 0,
                     "hint_text": "Minute must be between 0 and 59"},
                    {"kind": "max_value", "widget": "w_minute", "value": 59,
                     "hint_text": "Minute must be between 0 and 59"},
                ],
                # only midnight-minus-one with an empty label crashes; the
                # scripted generators never produce that combination
                "crashes": [{"crash_id": "rollover_with_empty_label",
                             "condition": ["and", ["==", ["num", "w_hour"], 23], ["==", ["num", "w_minute"], 59],
                                           ["is_empty", "w_label"]],
                             "message": "NullPointerException in rollover scheduler"}],
                "success_transition": "AlarmListActivity",
            },
            text_view_page("AlarmListActivity"),
        ],
    },
]


def prog(rule: str, base: dict[str, str], ops: list[str], axis: str | None = None, batch: int | None = None) -> str:
    lines = [f"rule: {rule}", "target: " + ", ".join(base)]
    lines += [f"base: {k} = {json.dumps(v)}" for k, v in base.items()]
    lines += [f"op: {o}" for o in ops]
    if axis:
        lines.append(f"axis: {axis}")
    if batch:
        lines.append(f"batch: {batch}")
    return "\n".join(lines)


def gen(rule: str, program: str) -> str:
    return render_generator_response(rule, program)


# (app, activity) -> (valid replies, generator replies)
SCRIPT = {
    ("FontSize", "SettingsActivity"): (
        [render_valid_input_response("the font size is a positive number of points", ["16"])],
        [gen("Negate the font size so that it becomes a negative number.",
             prog("negate the font size", {"w_size": "16"}, ["number_negate"], batch=1))],
    ),
    ("Shopping", "PriceFilterActivity"): (
        [render_valid_input_response("both prices are decimal numbers and the minimum is not larger than the maximum",
                                     ["10", "100"])],
        [
            gen("Insert whitespace into the minimum price.",
                prog("whitespace in the minimum price", {"w_min": "10"},
                     ["charset_inject(class=whitespace, count=$N, pos=middle)"], axis="$N in [1, 2, 3]")),
            gen("Make the minimum price larger than the maximum price.",
                prog("minimum above maximum", {"w_min": "10", "w_max": "100"},
                     ["violate_order(w_min, w_max, 1)"], batch=1)),
        ],
    ),
    ("HealthLog", "BloodPressureActivity"): (
        [render_valid_input_response("both values are whole numbers and the diastolic value is lower than the "
                                     "systolic value", ["120", "80"])],
        [
            gen("Swap systolic and diastolic pressure.",
                prog("swap the two pressures", {"w_sys": "120", "w_dia": "80"}, ["swap(w_sys, w_dia)"])),
            gen("Make the diastolic pressure equal to the systolic pressure, at the boundary of the ordering.",
                prog("equal pressures", {"w_sys": "120", "w_dia": "80"}, ['set("120", on=w_dia)'])),
        ],
    ),
    ("SecureVault", "RegisterActivity"): (
        [
            render_valid_input_response("the username is free text and the password has at least 8 characters",
                                        ["alice", "password1"]),
            render_valid_input_response("the password needs 8 characters and one upper case letter",
                                        ["alice", "Password1"]),
        ],
        [gen("Append special symbols to the password.",
             prog("special symbols in the password", {"w_pass": "Password1"},
                  ["charset_inject(class=$C, count=1, pos=end)"], axis="$C in [emoji, whitespace, format_specifier]"))],
    ),
    ("BillSplit", "SplitActivity"): (
        [render_valid_input_response("all amounts are decimals and the shares add up to the total",
                                     ["100", "60", "40"])],
        [gen("Scale the first share so that the shares no longer add up to the total.",
             prog("scale the first share", {"w_p1": "60"}, ["number_scale($F)"], axis="$F in [0.5, 2, 10]"))],
    ),
    ("Flights", "SearchActivity"): (
        [render_valid_input_response("cities are text and differ, dates are YYYY-MM-DD and departure is before return",
                                     ["Paris", "Rome", "2024-05-01", "2024-05-10"])],
        [
            gen("Flip the case of the departure city.",
                prog("flip city case", {"w_from": "Paris"}, ["case_flip"])),
            gen("Swap the departure and return dates.",
                prog("return before departure", {"w_depart": "2024-05-01", "w_return": "2024-05-10"},
                     ["swap(w_depart, w_return)"])),
        ],
    ),
    ("Currency", "ConverterActivity"): (
        [render_valid_input_response("the amount is a decimal number", ["100"])],
        [gen("Use amounts with more and more digits.",
             prog("very long amounts", {"w_amount": "100"}, ["digits($N)"], axis="$N in [5, 10, 15, 20, 25]"))],
    ),
    ("Messenger", "ComposeActivity"): (
        [render_valid_input_response("the recipient is a name and the message is not empty", ["Bob", "Hello"])],
        [
            gen("Leave the message empty.", prog("empty message", {"w_msg": "Hello"}, ["empty"])),
            gen("Insert invisible and direction-changing characters into the message.",
                prog("special characters in the message", {"w_msg": "Hello"},
                     ["charset_inject(class=$C, count=2, pos=middle)"], axis="$C in [emoji, combining, rtl_override]")),
        ],
    ),
    ("Contacts", "AddContactActivity"): (
        [render_valid_input_response("the phone number is digits only and the confirmation matches it",
                                     ["Alice", "5551234", "5551234"])],
        [gen("Use longer and longer phone numbers in both fields.",
             prog("long phone numbers", {"w_phone": "5551234", "w_phone2": "5551234"}, ["digits($N)"],
                  axis="$N in [8, 10, 12]"))],
    ),
    ("Notes", "SearchActivity"): (
        [render_valid_input_response("the query is free text without angle brackets", ["groceries"])],
        [gen("Append special characters to the search query.",
             prog("special characters in the query", {"w_query": "groceries"},
                  ["charset_inject(class=$C, count=1, pos=end)"], axis="$C in [punctuation, emoji, sql_meta]"))],
    ),
    ("Fitness", "BmiActivity"): (
        [render_valid_input_response("height and weight are positive decimals and height is at most 300",
                                     ["175", "70"])],
        [gen("Set the height to boundary values.",
             prog("boundary heights", {"w_height": "175"}, ["number_set($V)"], axis="$V in [-1, 500, 0]"))],
    ),
    ("Alarm", "AlarmActivity"): (
        [render_valid_input_response("hour is 0-23, minute is 0-59 and the label is text", ["7", "30", "Wake up"])],
        [
            gen("Use out-of-range hours.",
                prog("out of range hours", {"w_hour": "7"}, ["number_set($V)"], axis="$V in [24, -1, 99, 100]")),
            gen("Make the label longer and longer.",
                prog("long labels", {"w_label": "Wake up"}, ['pad($N, "z")'],
                     axis="$N in [" + ", ".join(str(n) for n in range(10, 60)) + "]", batch=50)),
        ],
    ),
}


def weak(base: dict[str, str]) -> str:
    # identity program: reproduces the valid input, so it never finds anything
    return gen("Keep the input unchanged.", prog("unchanged input", base, []))


SEED = [
    # (app, page, input widget, nearby widgets, buggy input)
    ("Hacker News", "LoginActivity", "Username", "Password;Login", "%s%s%s%n"),
    ("Wikipedia", "SearchActivity", "Search Wikipedia", "Recent searches", "\u202etxt.exe"),
    ("Signal", "RegistrationActivity", "Phone number", "Country code;Register", "99999999999999999999"),
    ("Firefox Focus", "UrlInputActivity", "Search or enter address", "Suggestions", "javascript:%00"),
    ("K-9 Mail", "AccountSetupActivity", "Email address", "Password;Next", "a@b@c"),
    ("AnkiDroid", "DeckPickerActivity", "Deck name", "Create deck", "::"),
    ("Simple Calendar", "EventActivity", "Start date", "End date;Save", "2023-02-30"),
    ("Simple Calendar", "EventActivity", "End date", "Start date;Save", "1970-01-01"),
    ("Amaze", "RenameActivity", "New file name", "Rename", "../../etc"),
    ("Markor", "NewFileActivity", "File name", "Create", "\u0000"),
    ("OpenTracks", "IntervalActivity", "Interval (min)", "Settings", "-1"),
    ("Tip Calculator", "MainActivity", "Bill amount", "Tip percent;People", "1e309"),
    ("Tip Calculator", "MainActivity", "Number of people", "Bill amount;Tip percent", "0"),
    ("Unit Converter", "ConvertActivity", "Value", "From unit;To unit", "NaN"),
    ("Loan Calculator", "LoanActivity", "Interest rate", "Principal;Years", "-0.5"),
    ("Loan Calculator", "LoanActivity", "Years", "Principal;Interest rate", "0"),
    ("Budget", "AddExpenseActivity", "Amount", "Category;Date", "12,50"),
    ("Budget", "AddExpenseActivity", "Date", "Amount;Category", "31/12/2023"),
    ("Weather", "CityActivity", "City name", "Search", "'; DROP TABLE cities;--"),
    ("Notepad", "EditActivity", "Note title", "Body", "\U0001F468\u200d\U0001F469\u200d\U0001F467" * 40),
    ("QR Generator", "TextActivity", "Text to encode", "Generate", "A" * 3000),
    ("Habit Tracker", "NewHabitActivity", "Times per week", "Habit name", "8"),
    ("Habit Tracker", "NewHabitActivity", "Habit name", "Times per week", " "),
    ("Pomodoro", "SettingsActivity", "Focus length", "Break length", "0"),
    ("Pomodoro", "SettingsActivity", "Break length", "Focus length", "-5"),
    ("Metronome", "TempoActivity", "Beats per minute", "Start", "100000"),
    ("Recipe Box", "RecipeActivity", "Servings", "Ingredients", "1.5.2"),
    ("Chess Clock", "TimeActivity", "Minutes", "Increment", "99999999999"),
    ("Hotel Booking", "DatesActivity", "Check-out date", "Check-in date;Guests", "2024-01-01"),
    ("Hotel Booking", "DatesActivity", "Guests", "Check-in date;Check-out date", "-2"),
    ("Train Tickets", "SearchActivity", "Arrival station", "Departure station;Date", "Berlin"),
    ("Bank", "TransferActivity", "Amount", "IBAN;Reference", "0.001"),
    ("Bank", "TransferActivity", "IBAN", "Amount;Reference", "DE00 0000"),
    ("Bank", "PinActivity", "PIN", "Confirm PIN", "12a4"),
    ("Social", "SignUpActivity", "Password", "Confirm password;Sign up", "\u0301\u0301\u0301"),
    ("Social", "SignUpActivity", "Confirm password", "Password;Sign up", "Passw0rd "),
    ("Social", "ProfileActivity", "Age", "Name;Save", "-1"),
    ("Social", "ProfileActivity", "Bio", "Name;Age", "\u202e\u202e"),
    ("Fuel Log", "RefuelActivity", "Liters", "Price per liter;Odometer", "1e-400"),
    ("Fuel Log", "RefuelActivity", "Odometer", "Liters;Price per liter", "-100"),
    ("Translator", "InputActivity", "Text", "Source language;Target language", "\t\n\t"),
    ("Password Manager", "GeneratorActivity", "Length", "Symbols;Digits", "0"),
    ("Password Manager", "EntryActivity", "URL", "Username;Password", "http://%"),
    ("Scientific Calculator", "MainActivity", "Expression", "Result", "1/0"),
    ("Scientific Calculator", "MainActivity", "Expression", "Result", "(((((((("),
    ("Timer", "SetTimerActivity", "Seconds", "Minutes;Hours", "60"),
    ("Timer", "SetTimerActivity", "Hours", "Minutes;Seconds", "2147483648"),
    ("Fitness Tracker", "GoalActivity", "Daily steps", "Distance", "1,000"),
    ("Podcast", "SearchActivity", "Search podcasts", "Discover", "%"),
    ("Shop", "CheckoutActivity", "Quantity", "Price;Total", "-3"),
]


def main() -> None:
    bench = ROOT / "bench"
    bench.mkdir(exist_ok=True)
    for i, spec in enumerate(SPECS, start=1):
        name = f"{i:02d}_{spec['app_name'].lower()}.json"
        (bench / name).write_text(json.dumps(spec, indent=2, ensure_ascii=True) + "\n", encoding="utf-8")

    script: dict[str, list[str]] = {}
    for (app, activity), (valid, generators) in SCRIPT.items():
        script[f"valid/{app}/{activity}"] = valid
        script[f"generator/{app}/{activity}"] = generators
        spec = next(s for s in SPECS if s["app_name"] == app)
        page = next(p for p in spec["pages"] if p["activity_name"] == activity)
        last_valid = json.loads(json.dumps(valid[-1]))
        values = [line.split(" is ", 1)[1].rstrip(".") for line in last_valid.split("\n")[1:]]
        base = {wd["id"]: json.loads(v) for wd, v in zip(page["widgets"], values)}
        script[f"generator/{app}/{activity}@weak"] = [weak(base)]
    fixtures = ROOT / "fixtures"
    fixtures.mkdir(exist_ok=True)
    (fixtures / "happy.script").write_text(json.dumps(script, indent=2, ensure_ascii=True) + "\n", encoding="utf-8")
    (fixtures / "bench_config.json").write_text(
        json.dumps({"clock": "simulated", "attempt_budget": 30, "time_budget_seconds": 1800}, indent=2) + "\n",
        encoding="utf-8",
    )

    data = ROOT / "data"
    data.mkdir(exist_ok=True)
    assert len(SEED) == 50
    with open(data / "seed_examples.jsonl", "w", encoding="utf-8") as fh:
        for rid, (app, page, widget, nearby, buggy) in enumerate(SEED, start=1):
            rec = {
                "record_id": rid,
                "source": "seed",
                "context": {"app_name": app, "page_name": page, "input_widget": widget, "nearby_widgets": nearby,
                            "dynamic_hint": ""},
                "mutation_rule": None,
                "buggy_input": buggy,
            }
            fh.write(json.dumps(rec, ensure_ascii=True) + "\n")


if __name__ == "__main__":
    main()
