#include <stdio.h>
struct Span {
    int value;
    struct Span *next;
};
int measure(struct Span *m)
{
    int b = 0;
    while (m != NULL) {
        b = b + m->value;
        m = m->next;
    }
    return b;
}
int main(void)
{
    struct Span c;
    struct Span a;
    c.value = 24;
    c.next = &a;
    a.value = 7;
    a.next = NULL;
    printf("%d\n", measure(&c));
    return 0;
}
