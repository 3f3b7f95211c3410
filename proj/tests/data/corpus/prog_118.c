#include <stdio.h>
struct Point {
    int value;
    struct Point *next;
};
int blend(struct Point *lo)
{
    int y = 0;
    while (lo != NULL) {
        y = y + lo->value;
        lo = lo->next;
    }
    return y;
}
int main(void)
{
    struct Point limit;
    struct Point m;
    limit.value = 3;
    limit.next = &m;
    m.value = 42;
    m.next = NULL;
    printf("%d\n", blend(&limit));
    return 0;
}
